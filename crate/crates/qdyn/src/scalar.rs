//! Scalar plumbing shared by the generic modules.

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;

/// Real field the linear-algebra modules are generic over (`f32`, `f64`).
pub trait Real: RealField + Copy {}

impl<T: RealField + Copy> Real for T {}

/// Dense complex matrix over `T`.
pub type CMatrix<T> = DMatrix<Complex<T>>;

#[inline]
pub fn real<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(real(re), real(im))
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_subset().unwrap_or(f64::NAN)
}

/// A tolerance that is never tighter than a few hundred ulps of `T`.
///
/// The documented thresholds (1e-9, 1e-10, ...) are stated for `f64`; in `f32`
/// they would reject every matrix, so they are floored at `256·ε_T`.
pub fn tol<T: Real>(nominal: f64) -> T {
    let floor = T::default_epsilon() * real(256.0);
    let t = real::<T>(nominal);
    if t > floor {
        t
    } else {
        floor
    }
}

/// Acceptance thresholds for [`crate::states::DensityMatrix`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance<T> {
    /// Trace and hermiticity defect.
    pub trace: T,
    /// Most negative eigenvalue still accepted as zero.
    pub psd: T,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            trace: tol(1e-9),
            psd: tol(1e-10),
        }
    }
}
