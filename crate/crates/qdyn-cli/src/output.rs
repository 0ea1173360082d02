//! Artifact writing: every file carries the tool version, the config echo
//! and the seed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub seed: u64,
}

impl Meta {
    pub fn new(command: &str, config: &impl Serialize, seed: u64) -> Self {
        Self {
            tool: "qdyn",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            seed,
        }
    }
}

pub fn json_document(meta: &Meta, result: &impl Serialize) -> CliResult<String> {
    #[derive(Serialize)]
    struct Doc<'a, R: Serialize> {
        meta: &'a Meta,
        result: &'a R,
    }
    let mut s = serde_json::to_string_pretty(&Doc { meta, result }).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// CSV preceded by `#` comment lines holding the metadata.
pub fn csv_document(meta: &Meta, header: &[String], rows: &[Vec<String>]) -> CliResult<String> {
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    let mut out = format!(
        "# tool: {} {}\n# command: {}\n# config: {}\n# seed: {}\n",
        meta.tool, meta.version, meta.command, meta.config, meta.seed
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(internal)?;
    for r in rows {
        w.write_record(r).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))?);
    Ok(out)
}

/// Serialises non-finite values as `"inf"`, `"-inf"` or `"nan"`; JSON has no literal for them.
pub fn extended_f64<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&x.to_string().to_lowercase())
    }
}

pub fn num(x: f64) -> String {
    // no "-0e0"
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:e}")
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::validation(format!("FileNotFound: {}", path.display())),
        _ => CliError::Internal(format!("cannot read {}: {e}", path.display())),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("malformed JSON in {}: {e}", path.display())))
}

/// Companion gnuplot script next to a CSV file: `<csv>.gp`.
pub fn gnuplot_companion(meta: &Meta, csv: &Path, x: usize, series: &[(usize, &str)], ylabel: &str) -> CliResult<PathBuf> {
    let name = csv.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut script = format!(
        "# generated by {} {} ({})\nset datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\nset xlabel 'column {}'\nset ylabel '{}'\nplot ",
        meta.tool, meta.version, meta.command, x, ylabel
    );
    let parts: Vec<String> = series
        .iter()
        .map(|(col, title)| format!("'{name}' using {x}:{col} with lines title '{title}'"))
        .collect();
    script.push_str(&parts.join(", \\\n     "));
    script.push('\n');
    let mut path = csv.as_os_str().to_owned();
    path.push(".gp");
    let path = PathBuf::from(path);
    fs::write(&path, script).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
