//! Open quantum dynamics of finite-level systems.
//!
//! Linear-algebra modules (`states`, `channels`, `entanglement`, `lindblad`)
//! are generic over the real field; the bath and atom models are `f64`.

pub mod atomfield;
pub mod channels;
pub mod entanglement;
pub mod error;
pub mod io;
pub mod lindblad;
pub mod linalg;
pub mod markov;
pub mod ode;
pub mod quad;
pub mod random;
pub mod scalar;
pub mod special;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use scalar::{CMatrix, Real, Tolerance};

pub type DensityMatrix = states::DensityMatrix<f64>;
pub type DensityMatrix32 = states::DensityMatrix<f32>;
pub type BlochVector = states::BlochVector<f64>;
pub type QuantumChannel = channels::QuantumChannel<f64>;
pub type PauliFormMap = channels::PauliFormMap<f64>;
pub type LindbladGenerator = lindblad::LindbladGenerator<f64>;
pub type BlochAffine = lindblad::BlochAffine<f64>;
pub type LindbladGenerator32 = lindblad::LindbladGenerator<f32>;
