use nalgebra::Vector3;
use qdyn::atomfield::{
    entanglement_generation_test, evolve_two_atom, kossakowski_matrix, single_atom_bloch, single_atom_coeffs, AtomParams, TwoAtomState,
};
use qdyn::channels::{apply, choi_of, is_completely_positive, is_positive_map, kraus_from_choi};
use qdyn::entanglement::{concurrence, ppt_verdict, Separability};
use qdyn::io::{ChannelJson, GeneratorJson, MatrixJson};
use qdyn::lindblad::{cp_ledger, positivity_witness, trajectory};
use qdyn::linalg::{eigvalsh, hermitian_part, min_eigenvalue};
use qdyn::markov::{
    convolutionless_generator, redfield_generator, singular_coupling_generator, weak_coupling_generator, BathCorrelation,
};
use qdyn::states::bloch_to_density;
use qdyn::{BlochVector, CMatrix, DensityMatrix, QuantumChannel};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{csv_document, emit, gnuplot_companion, json_document, num, read_json, Meta};
use crate::repro;
use crate::{
    AtomSingleArgs, AtomTwoArgs, BathModel, BuiltinChannel, ChannelArgs, DetectArgs, EntangleArgs, EvolveArgs, MarkovArgs, ReproArgs,
    TwoAtomInit,
};

fn gnuplot_target(gnuplot: bool, out: &Option<std::path::PathBuf>) -> CliResult<()> {
    if gnuplot && out.is_none() {
        return Err(CliError::validation("--gnuplot needs --out"));
    }
    Ok(())
}

fn direction(n: &[f64]) -> CliResult<Vector3<f64>> {
    match n {
        [x, y, z] => Ok(Vector3::new(*x, *y, *z)),
        _ => Err(CliError::validation(format!("--n needs three components, got {}", n.len()))),
    }
}

/// −Σ λ ln λ over the positive part of the spectrum of the hermitian part.
fn entropy(m: &CMatrix<f64>) -> f64 {
    eigvalsh(&hermitian_part(m)).iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum()
}

pub fn detect(a: &DetectArgs, seed: u64) -> CliResult<()> {
    let meta = Meta::new("detect", a, seed);
    let rho = read_json::<MatrixJson>(&a.state)?.to_density()?;
    let n = rho.dim();
    let dims = match a.dims.as_deref() {
        Some([x, y]) => (*x, *y),
        Some(_) => return Err(CliError::validation("--dims needs two values")),
        None => {
            let k = (n as f64).sqrt().round() as usize;
            if k * k != n {
                return Err(CliError::validation(format!("dimension {n} is not a square; pass --dims")));
            }
            (k, k)
        }
    };
    if dims.0 * dims.1 != n {
        return Err(qdyn::Error::DimensionMismatch { expected: dims.0 * dims.1, got: n }.into());
    }
    let v = ppt_verdict(&rho, dims)?;
    #[derive(Serialize)]
    struct Report {
        dim: usize,
        dims: [usize; 2],
        min_pt_eig: f64,
        concurrence: Option<f64>,
        verdict: &'static str,
    }
    let r = Report {
        dim: n,
        dims: [dims.0, dims.1],
        min_pt_eig: v.min_pt_eigenvalue,
        concurrence: if dims == (2, 2) { Some(concurrence(&rho)?) } else { None },
        verdict: match v.verdict {
            Separability::Entangled => "entangled",
            Separability::Separable => "separable",
            Separability::Inconclusive => "inconclusive",
        },
    };
    emit(a.out.as_deref(), &json_document(&meta, &r)?)
}

pub fn channel(a: &ChannelArgs, seed: u64) -> CliResult<()> {
    let meta = Meta::new("channel", a, seed);
    let ch = match (&a.channel, a.builtin) {
        (Some(p), _) => read_json::<ChannelJson>(p)?.to_channel()?,
        (None, Some(b)) => {
            if a.dim < 1 {
                return Err(CliError::validation("--dim must be at least 1"));
            }
            match b {
                BuiltinChannel::Identity => QuantumChannel::identity(a.dim),
                BuiltinChannel::Transpose => QuantumChannel::transpose(a.dim),
                BuiltinChannel::DiagonalProjection => QuantumChannel::diagonal_projection(a.dim),
            }
        }
        (None, None) => return Err(CliError::validation("pass --channel or --builtin")),
    };
    let choi = choi_of(&ch);
    let mut spectrum: Vec<f64> = eigvalsh(&choi).iter().copied().collect();
    spectrum.sort_by(f64::total_cmp);
    let cp = is_completely_positive(&ch);
    let pos = is_positive_map(&ch, a.trials, seed);
    let kraus = if cp.completely_positive {
        Some(kraus_from_choi(&choi)?.iter().map(MatrixJson::from_matrix).collect::<Vec<_>>())
    } else {
        None
    };
    let output = match &a.state {
        Some(p) => {
            let rho = read_json::<MatrixJson>(p)?.to_density()?;
            Some(MatrixJson::from_matrix(&apply(&ch, rho.matrix())?))
        }
        None => None,
    };
    #[derive(Serialize)]
    struct Positivity {
        /// Heuristic when true; a negative value is a certificate.
        positive: bool,
        worst_product_expectation: f64,
        restarts: usize,
    }
    #[derive(Serialize)]
    struct Report {
        dim: usize,
        trace_preserving: bool,
        completely_positive: bool,
        choi_eigenvalues: Vec<f64>,
        choi_min_eig: f64,
        positive_map: Positivity,
        kraus: Option<Vec<MatrixJson>>,
        output: Option<MatrixJson>,
    }
    let r = Report {
        dim: ch.dim(),
        trace_preserving: ch.trace_preserving(),
        completely_positive: cp.completely_positive,
        choi_eigenvalues: spectrum,
        choi_min_eig: cp.min_eigenvalue,
        positive_map: Positivity { positive: pos.positive, worst_product_expectation: pos.worst_value, restarts: a.trials.max(32) },
        kraus,
        output,
    };
    emit(a.out.as_deref(), &json_document(&meta, &r)?)
}

pub fn evolve(a: &EvolveArgs, seed: u64) -> CliResult<()> {
    let meta = Meta::new("evolve", a, seed);
    gnuplot_target(a.gnuplot, &a.out)?;
    if !a.t.is_finite() || a.t < 0.0 {
        return Err(qdyn::Error::NegativeTime { t: a.t }.into());
    }
    if a.grid == 0 {
        return Err(CliError::validation("--grid must be at least 1"));
    }
    let g = read_json::<GeneratorJson>(&a.generator)?.to_generator()?;
    let rho = read_json::<MatrixJson>(&a.state)?.to_density()?;
    if rho.dim() != g.dim() {
        return Err(qdyn::Error::DimensionMismatch { expected: g.dim(), got: rho.dim() }.into());
    }
    let n = g.dim();
    let times: Vec<f64> = (0..=a.grid).map(|k| a.t * k as f64 / a.grid as f64).collect();
    let traj = trajectory(&g, &rho, &times)?;
    let mut header = vec!["t".to_string()];
    for i in 0..n {
        for j in 0..n {
            header.push(format!("re_{i}{j}"));
            header.push(format!("im_{i}{j}"));
        }
    }
    header.push("min_eigenvalue".into());
    header.push("entropy".into());
    let rows: Vec<Vec<String>> = times
        .iter()
        .zip(&traj)
        .map(|(t, m)| {
            let mut row = vec![num(*t)];
            for i in 0..n {
                for j in 0..n {
                    row.push(num(m[(i, j)].re));
                    row.push(num(m[(i, j)].im));
                }
            }
            row.push(num(min_eigenvalue(&hermitian_part(m))));
            row.push(num(entropy(m)));
            row
        })
        .collect();
    emit(a.out.as_deref(), &csv_document(&meta, &header, &rows)?)?;
    if let (true, Some(out)) = (a.gnuplot, &a.out) {
        let k = 2 + 2 * n * n;
        gnuplot_companion(&meta, out, 1, &[(k, "min_eigenvalue"), (k + 1, "entropy")], "value")?;
    }
    Ok(())
}

pub fn markov_compare(a: &MarkovArgs, seed: u64) -> CliResult<()> {
    let meta = Meta::new("markov-compare", a, seed);
    let bath = match a.model {
        BathModel::ThermalDerivative => BathCorrelation::thermal_scalar_derivative(a.beta, a.coupling, a.cutoff)?,
        BathModel::Ohmic => BathCorrelation::ohmic_cutoff(a.beta, a.coupling, a.cutoff)?,
        BathModel::WhiteNoise => BathCorrelation::white_noise(a.coupling)?,
        BathModel::Exponential => BathCorrelation::exponential_single_axis(a.coupling, a.cutoff)?,
    };
    let gens = [
        ("redfield", redfield_generator(a.omega, &bath)?),
        ("weak-coupling", weak_coupling_generator(a.omega, &bath)?),
        ("singular-coupling", singular_coupling_generator(a.omega, &bath)?),
        ("convolutionless", convolutionless_generator(a.omega, &bath)?),
    ];
    let header: Vec<String> = ["name", "alpha", "b", "d", "cp", "positive", "witness_ddet"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = gens
        .iter()
        .map(|(name, d)| {
            let w = positivity_witness(d);
            vec![
                name.to_string(),
                num(d.alpha()),
                num(d.b()),
                num(d.drift()[2]),
                cp_ledger(d).completely_positive().to_string(),
                w.is_none().to_string(),
                w.map(|w| num(w.ddet)).unwrap_or_default(),
            ]
        })
        .collect();
    emit(a.out.as_deref(), &csv_document(&meta, &header, &rows)?)
}

pub fn atom_single(a: &AtomSingleArgs, seed: u64) -> CliResult<()> {
    let meta = Meta::new("atomfield single", a, seed);
    let p = AtomParams::new(a.omega, direction(&a.n)?, a.beta)?;
    let k = single_atom_coeffs(&p);
    let kos = kossakowski_matrix(&p);
    let d = single_atom_bloch(&p);
    let d3 = d.d3();
    #[derive(Serialize)]
    #[allow(non_snake_case)]
    struct Report {
        A: f64,
        B: f64,
        C: f64,
        R: f64,
        kossakowski: MatrixJson,
        hamiltonian_vector: [f64; 3],
        d3: [[f64; 3]; 3],
        drift: [f64; 3],
        stationary_bloch: Option<[f64; 3]>,
        completely_positive: bool,
        excitation_rate: f64,
    }
    let arr = |v: Vector3<f64>| [v[0], v[1], v[2]];
    let r = Report {
        A: k.a,
        B: k.b,
        C: k.c,
        R: k.r,
        kossakowski: MatrixJson::from_matrix(&CMatrix::from_fn(3, 3, |i, j| kos[(i, j)])),
        hamiltonian_vector: arr(d.omega()),
        d3: std::array::from_fn(|i| std::array::from_fn(|j| d3[(i, j)])),
        drift: arr(d.drift()),
        stationary_bloch: d.stationary_bloch().map(arr),
        completely_positive: cp_ledger(&d).completely_positive(),
        // 2(A − B), the ground-to-excited rate
        excitation_rate: 2.0 * (k.a - k.b),
    };
    emit(a.out.as_deref(), &json_document(&meta, &r)?)
}

fn initial_two_atom(init: TwoAtomInit, eps: f64, n: &Vector3<f64>) -> CliResult<TwoAtomState> {
    let up = BlochVector::new(*n)?;
    let down = BlochVector::new(-n)?;
    Ok(match init {
        TwoAtomInit::Antiparallel => TwoAtomState::product(&up, &down),
        TwoAtomInit::Parallel => TwoAtomState::product(&up, &up),
        TwoAtomInit::Ground => TwoAtomState::product(&down, &down),
        TwoAtomInit::Singlet => TwoAtomState::singlet(),
        TwoAtomInit::SingletMixture => TwoAtomState::singlet_mixture(eps)?,
    })
}

pub fn atom_two(a: &AtomTwoArgs, seed: u64) -> CliResult<()> {
    let meta = Meta::new("atomfield two", a, seed);
    gnuplot_target(a.gnuplot, &a.out)?;
    let n = direction(&a.n)?;
    let p = AtomParams::new(a.omega, n, a.beta)?;
    if !(a.tmax > 0.0 && a.tmax.is_finite()) {
        return Err(CliError::validation(format!("--tmax must be positive and finite, got {}", a.tmax)));
    }
    if a.grid == 0 {
        return Err(CliError::validation("--grid must be at least 1"));
    }
    let s0 = initial_two_atom(a.init, a.eps, &n)?;
    let times: Vec<f64> = (0..=a.grid).map(|k| a.tmax * k as f64 / a.grid as f64).collect();
    let traj = evolve_two_atom(&p, &s0, &times)?;
    let mut header: Vec<String> = ["t", "tau", "concurrence", "min_eigenvalue"].iter().map(|s| s.to_string()).collect();
    header.extend((1..=3).map(|i| format!("rho_0{i}")));
    header.extend((1..=3).map(|i| format!("rho_{i}0")));
    for i in 1..=3 {
        header.extend((1..=3).map(|j| format!("rho_{i}{j}")));
    }
    let mut rows = Vec::with_capacity(traj.len());
    for (t, s) in times.iter().zip(&traj) {
        let m = s.to_matrix();
        let rho = DensityMatrix::with_tolerance(m.clone(), Default::default(), true)?;
        let mut row = vec![num(*t), num(s.tau()), num(concurrence(&rho)?), num(min_eigenvalue(&m))];
        row.extend(s.to_vector().iter().map(|x| num(*x)));
        rows.push(row);
    }
    emit(a.out.as_deref(), &csv_document(&meta, &header, &rows)?)?;
    if let (true, Some(out)) = (a.gnuplot, &a.out) {
        gnuplot_companion(&meta, out, 1, &[(3, "concurrence"), (4, "min_eigenvalue")], "value")?;
    }
    Ok(())
}

/// Named pure qubit states or a unit Bloch vector `x,y,z`.
pub fn parse_pure(spec: &str) -> CliResult<DensityMatrix> {
    let v = match spec.trim() {
        "up" | "+" | "0" => Vector3::new(0.0, 0.0, 1.0),
        "down" | "-" | "1" => Vector3::new(0.0, 0.0, -1.0),
        "x+" => Vector3::new(1.0, 0.0, 0.0),
        "x-" => Vector3::new(-1.0, 0.0, 0.0),
        "y+" => Vector3::new(0.0, 1.0, 0.0),
        "y-" => Vector3::new(0.0, -1.0, 0.0),
        other => {
            let parts: Result<Vec<f64>, _> = other.split(',').map(|s| s.trim().parse::<f64>()).collect();
            match parts.as_deref() {
                Ok([x, y, z]) => {
                    let v = Vector3::new(*x, *y, *z);
                    if (v.norm() - 1.0).abs() > 1e-9 {
                        return Err(CliError::validation(format!("state `{other}` is not pure: |r| = {}", v.norm())));
                    }
                    v.normalize()
                }
                _ => return Err(CliError::validation(format!("cannot parse pure state `{other}`"))),
            }
        }
    };
    Ok(bloch_to_density(&BlochVector::new(v)?))
}

pub fn entangle_test(a: &EntangleArgs, seed: u64) -> CliResult<()> {
    let meta = Meta::new("atomfield entangle-test", a, seed);
    let p = AtomParams::new(a.omega, direction(&a.n)?, a.beta)?;
    let t = entanglement_generation_test(&p, &parse_pure(&a.phi)?, &parse_pure(&a.psi)?)?;
    #[derive(Serialize)]
    struct Report {
        fires: bool,
        lhs: f64,
        rhs: f64,
        statistic: f64,
    }
    let r = Report { fires: t.fires, lhs: t.lhs, rhs: t.rhs, statistic: t.statistic() };
    emit(a.out.as_deref(), &json_document(&meta, &r)?)
}

pub const EXTRA_CASES: [&str; 2] = ["werner-concurrence", "two-atom-asymptotic"];

pub fn repro(a: &ReproArgs, seed: u64) -> CliResult<()> {
    if a.list {
        for c in EXTRA_CASES {
            println!("{c}");
        }
        for c in &repro::CRITERIA {
            println!("{}\t{}", c.name, c.summary);
        }
        return Ok(());
    }
    let meta = Meta::new("repro", a, seed);
    match a.case.as_deref() {
        Some("werner-concurrence") => {
            let table = repro::werner_table(41)?;
            let header: Vec<String> = ["F", "concurrence", "min_pt_eig"].iter().map(|s| s.to_string()).collect();
            let rows: Vec<Vec<String>> = table.iter().map(|r| r.iter().map(|x| num(*x)).collect()).collect();
            emit(a.out.as_deref(), &csv_document(&meta, &header, &rows)?)
        }
        Some("two-atom-asymptotic") => {
            let r = repro::two_atom_asymptotic(a.beta, 1.0)?;
            emit(a.out.as_deref(), &json_document(&meta, &r)?)
        }
        filter => {
            let rows = repro::run_suite(filter, seed)?;
            emit(a.out.as_deref(), &json_document(&meta, &rows)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_specs() {
        assert!(parse_pure("up").is_ok());
        assert!(parse_pure("0.6,0,0.8").is_ok());
        assert!(matches!(parse_pure("0.5,0,0"), Err(CliError::Validation(_))));
        assert!(parse_pure("nonsense").is_err());
    }

    #[test]
    fn entropy_of_mixed_qubit() {
        let m = DensityMatrix::maximally_mixed(2).into_matrix();
        assert!((entropy(&m) - 2f64.ln()).abs() < 1e-14);
    }
}
