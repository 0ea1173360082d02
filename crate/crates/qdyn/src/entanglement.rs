//! Partial transposition, PPT test, concurrence, Werner and Bell states.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{real, to_f64, tol, CMatrix, Real};
use crate::states::{DensityMatrix, Subsystem};

/// Flip V|ij⟩ = |ji⟩ on Cⁿ⊗Cⁿ.
pub fn flip<T: Real>(n: usize) -> CMatrix<T> {
    let mut v = CMatrix::<T>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            v[(j * n + i, i * n + j)] = Complex::one();
        }
    }
    v
}

/// P₊ = |Ω⟩⟨Ω|, |Ω⟩ = Σ|ii⟩/√n.
pub fn maximally_entangled<T: Real>(n: usize) -> CMatrix<T> {
    let mut m = CMatrix::<T>::zeros(n * n, n * n);
    let w = Complex::from(real::<T>(1.0 / n as f64));
    for i in 0..n {
        for j in 0..n {
            m[(i * n + i, j * n + j)] = w;
        }
    }
    m
}

pub fn partial_transpose<T: Real>(m: &CMatrix<T>, dims: (usize, usize), which: Subsystem) -> Result<CMatrix<T>> {
    let (na, nb) = dims;
    if m.nrows() != na * nb || !m.is_square() {
        return Err(Error::DimensionMismatch { expected: na * nb, got: m.nrows() });
    }
    Ok(DMatrix::from_fn(na * nb, na * nb, |r, c| {
        let (a, i) = (r / nb, r % nb);
        let (b, j) = (c / nb, c % nb);
        match which {
            Subsystem::A => m[(b * nb + i, a * nb + j)],
            Subsystem::B => m[(a * nb + j, b * nb + i)],
        }
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Separability {
    Entangled,
    Separable,
    /// PT is positive but the dimensions are beyond 2×2 / 2×3.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PptVerdict<T> {
    pub min_pt_eigenvalue: T,
    pub verdict: Separability,
}

pub fn ppt_verdict<T: Real>(rho: &DensityMatrix<T>, dims: (usize, usize)) -> Result<PptVerdict<T>> {
    let pt = partial_transpose(rho.matrix(), dims, Subsystem::A)?;
    let min = linalg::min_eigenvalue(&pt);
    let small = dims.0 * dims.1 <= 6;
    let verdict = if min < -tol::<T>(1e-10) {
        Separability::Entangled
    } else if small {
        Separability::Separable
    } else {
        Separability::Inconclusive
    };
    Ok(PptVerdict { min_pt_eigenvalue: min, verdict })
}

/// Two-qubit concurrence max{R₁−R₂−R₃−R₄, 0}.
///
/// The R_k are the singular values of √ρ Y √ρ* (Y = σ₂⊗σ₂), i.e. the square
/// roots of the spectrum of ρ Y ρ* Y, without taking square roots of
/// rounding-level eigenvalues. Eigenvalues of ρ below 256ε are set to zero.
pub fn concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    let s = linalg::pauli::<T>();
    let y = linalg::kron(&s[2], &s[2]);
    let cut = tol::<T>(1e-14);
    let sq = linalg::hermitian_fn(rho.matrix(), |x| if x > cut { x.sqrt() } else { T::zero() });
    let a = &sq * &y * sq.conjugate();
    let mut roots: Vec<T> = a.singular_values().iter().copied().collect();
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let c = roots[0] - roots[1] - roots[2] - roots[3];
    Ok(c.max(T::zero()).min(T::one()))
}

/// Werner family parameters: Cⁿ⊗Cⁿ, F = Tr[ρ_F V] ∈ [−1, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WernerParams {
    pub n: usize,
    pub f: f64,
}

pub fn werner_state<T: Real>(p: WernerParams) -> Result<DensityMatrix<T>> {
    if !(-1.0..=1.0).contains(&p.f) {
        return Err(Error::FOutOfRange { f: p.f });
    }
    let n = p.n as f64;
    let denom = n * (n * n - 1.0);
    let alpha = (n - p.f) / denom;
    let beta = (n * p.f - 1.0) / denom;
    let m = linalg::identity::<T>(p.n * p.n) * Complex::from(real::<T>(alpha)) + flip::<T>(p.n) * Complex::from(real::<T>(beta));
    DensityMatrix::new(m)
}

/// Bell kets, in the order P₊, P₋, Q₊, Q₋ of (|00⟩±|11⟩)/√2, (|01⟩±|10⟩)/√2.
pub fn bell_basis<T: Real>() -> [DVector<Complex<T>>; 4] {
    let h = Complex::from(real::<T>(0.5).sqrt());
    let z = Complex::zero();
    [
        DVector::from_vec(vec![h, z, z, h]),
        DVector::from_vec(vec![h, z, z, -h]),
        DVector::from_vec(vec![z, h, h, z]),
        DVector::from_vec(vec![z, h, -h, z]),
    ]
}

/// ρ = Σ λ_k ρ¹_k ⊗ ρ²_k.
#[derive(Clone, Debug)]
pub struct SeparableDecomposition<T: Real> {
    pub weights: Vec<T>,
    pub factors: Vec<(DensityMatrix<T>, DensityMatrix<T>)>,
}

impl<T: Real> SeparableDecomposition<T> {
    pub fn assemble(&self) -> Result<DensityMatrix<T>> {
        let total = self.weights.iter().fold(T::zero(), |s, &w| s + w);
        if self.weights.iter().any(|&w| w < T::zero()) || (total - T::one()).abs() > tol(1e-9) {
            return Err(Error::NotUnitTrace { trace: to_f64(total) });
        }
        let (a, b) = self.factors.first().map(|f| (f.0.dim(), f.1.dim())).unwrap_or((1, 1));
        let mut m = CMatrix::<T>::zeros(a * b, a * b);
        for (w, (x, y)) in self.weights.iter().zip(&self.factors) {
            if x.dim() != a || y.dim() != b {
                return Err(Error::DimensionMismatch { expected: a * b, got: x.dim() * y.dim() });
            }
            m += linalg::kron(x.matrix(), y.matrix()) * Complex::from(*w);
        }
        DensityMatrix::new(m)
    }
}
