use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not hermitian: max |A - A†| = {defect:e}")]
    NotHermitian { defect: f64 },
    #[error("trace is {trace} instead of 1")]
    NotUnitTrace { trace: f64 },
    #[error("matrix is not positive semi-definite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Bloch vector has norm {norm} > 1")]
    BlochOutOfBall { norm: f64 },
    #[error("Choi matrix is not positive semi-definite: smallest eigenvalue {min_eigenvalue:e}")]
    ChoiNotPsd { min_eigenvalue: f64 },
    #[error("Werner parameter F = {f} outside [-1, 1]")]
    FOutOfRange { f: f64 },
    #[error("negative evolution time {t}")]
    NegativeTime { t: f64 },
    #[error("operation needs a qubit (dim 2), got dim {dim}")]
    NotQubit { dim: usize },
    #[error("invalid basis: {reason}")]
    InvalidBasis { reason: String },
    #[error("integral did not converge: error estimate {estimate:e} above target {target:e}")]
    IntegralNotConverged { estimate: f64, target: f64 },
    #[error("noise covariance is not positive semi-definite: smallest eigenvalue {min_eigenvalue:e}")]
    CovarianceNotPsd { min_eigenvalue: f64 },
    #[error("input state is not pure: Tr ρ² = {purity}")]
    InputNotPure { purity: f64 },
    #[error("τ = {tau} outside [-3, 1]")]
    TauOutOfRange { tau: f64 },
    #[error("integrator could not meet tolerance at t = {t} (step {step:e})")]
    IntegrationToleranceExceeded { t: f64, step: f64 },
    #[error("out of domain: {0}")]
    OutOfDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
