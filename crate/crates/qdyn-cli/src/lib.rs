//! Command-line scenarios over `qdyn` with machine-readable outputs.

pub mod commands;
pub mod error;
pub mod output;
pub mod repro;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "qdyn", version, about = "Open quantum dynamics scenarios")]
pub struct Cli {
    /// Seed for randomised searches and samples; LINDBLAD_SEED overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// PPT test and concurrence of a bipartite state.
    Detect(DetectArgs),
    /// Complete positivity and positivity of a channel.
    Channel(ChannelArgs),
    /// Trajectory of a state under a Lindblad generator.
    Evolve(EvolveArgs),
    /// Compare Markovian approximations for a qubit coupled to a bath.
    MarkovCompare(MarkovArgs),
    /// Two-level atoms in a thermal scalar field.
    #[command(subcommand)]
    Atomfield(AtomCommand),
    /// Reproduce reference results.
    Repro(ReproArgs),
}

#[derive(Debug, Subcommand)]
pub enum AtomCommand {
    /// Kossakowski coefficients and Bloch form of one atom.
    Single(AtomSingleArgs),
    /// Two-atom trajectory.
    Two(AtomTwoArgs),
    /// Initial-time entanglement generation test for a product state.
    EntangleTest(EntangleArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    /// State JSON {dim, re, im}.
    #[arg(long)]
    pub state: PathBuf,
    /// Subsystem dimensions, e.g. 2,3; defaults to a square split.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinChannel {
    Identity,
    Transpose,
    DiagonalProjection,
}

#[derive(Debug, Args, Serialize)]
pub struct ChannelArgs {
    /// Channel JSON {dim, kraus:[...]} or {dim, choi:{...}}.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    pub channel: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<BuiltinChannel>,
    /// Dimension for a built-in channel.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Optional input state to push through the channel.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Restarts of the product-vector search (at least 32 are run).
    #[arg(long, default_value_t = 32)]
    pub trials: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvolveArgs {
    /// Generator JSON {dim, H, C, basis}.
    #[arg(long = "gen")]
    pub generator: PathBuf,
    #[arg(long)]
    pub state: PathBuf,
    /// Final time.
    #[arg(long)]
    pub t: f64,
    /// Number of time steps; the grid has grid + 1 points.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write `<out>.gp`.
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BathModel {
    /// Time derivative of a massless scalar field at inverse temperature β;
    /// `--coupling` is λ, `--cutoff` the regulator ε.
    #[value(alias = "ex34")]
    ThermalDerivative,
    /// Ohmic spectral density with exponential cutoff `--cutoff`.
    Ohmic,
    /// δ-correlated bath of strength `--coupling`.
    WhiteNoise,
    /// G(t) = coupling · e^{−cutoff |t|}.
    Exponential,
}

#[derive(Debug, Args, Serialize)]
pub struct MarkovArgs {
    #[arg(long, value_enum, default_value = "thermal-derivative")]
    pub model: BathModel,
    #[serde(serialize_with = "output::extended_f64")]
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Level splitting Ω of H = (Ω/2)σ₃.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub coupling: f64,
    #[arg(long, default_value_t = 0.1)]
    pub cutoff: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AtomSingleArgs {
    #[arg(long)]
    pub omega: f64,
    /// Inverse temperature; `inf` for zero temperature.
    #[serde(serialize_with = "output::extended_f64")]
    #[arg(long)]
    pub beta: f64,
    /// Unit direction n, e.g. 0,0,1.
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "0,0,1")]
    pub n: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoAtomInit {
    /// First atom excited, second in the ground state.
    Antiparallel,
    /// Both atoms excited.
    Parallel,
    /// Both atoms in the ground state.
    Ground,
    Singlet,
    /// (ε/4)·1 + (1 − ε)·singlet, with `--eps`.
    SingletMixture,
}

#[derive(Debug, Args, Serialize)]
pub struct AtomTwoArgs {
    #[arg(long, value_enum, default_value = "antiparallel")]
    pub init: TwoAtomInit,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long)]
    pub omega: f64,
    #[serde(serialize_with = "output::extended_f64")]
    #[arg(long)]
    pub beta: f64,
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "0,0,1")]
    pub n: Vec<f64>,
    /// Final time.
    #[arg(long)]
    pub tmax: f64,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EntangleArgs {
    /// Pure state of the first atom: up, down, x+, x-, y+, y-, or a unit Bloch vector x,y,z.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: String,
    /// Pure state of the second atom, same syntax.
    #[arg(long, allow_hyphen_values = true)]
    pub psi: String,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[serde(serialize_with = "output::extended_f64")]
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "0,0,1")]
    pub n: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproArgs {
    /// `werner-concurrence`, `two-atom-asymptotic`, or a suite criterion
    /// name; the whole suite when absent.
    #[arg(long)]
    pub case: Option<String>,
    /// Inverse temperature for `two-atom-asymptotic`.
    #[serde(serialize_with = "output::extended_f64")]
    #[arg(long, default_value_t = f64::INFINITY)]
    pub beta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// List the available cases and exit.
    #[arg(long)]
    pub list: bool,
}

/// The effective seed: LINDBLAD_SEED when set, otherwise `--seed`.
pub fn resolve_seed(cli_seed: u64) -> CliResult<u64> {
    match std::env::var("LINDBLAD_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::validation(format!("LINDBLAD_SEED must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(cli_seed),
    }
}

pub fn dispatch(cli: Cli) -> CliResult<()> {
    let seed = resolve_seed(cli.seed)?;
    match cli.command {
        Command::Detect(a) => commands::detect(&a, seed),
        Command::Channel(a) => commands::channel(&a, seed),
        Command::Evolve(a) => commands::evolve(&a, seed),
        Command::MarkovCompare(a) => commands::markov_compare(&a, seed),
        Command::Atomfield(AtomCommand::Single(a)) => commands::atom_single(&a, seed),
        Command::Atomfield(AtomCommand::Two(a)) => commands::atom_two(&a, seed),
        Command::Atomfield(AtomCommand::EntangleTest(a)) => commands::entangle_test(&a, seed),
        Command::Repro(a) => commands::repro(&a, seed),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
