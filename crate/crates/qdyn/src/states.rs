//! Density matrices, Bloch vectors, entropy and partial traces.

use nalgebra::{DMatrix, DVector, Vector3, Vector4};
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{real, to_f64, CMatrix, Real, Tolerance};

/// Hermitian, unit-trace, positive semi-definite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    m: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates with the default tolerances.
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        Self::with_tolerance(m, Tolerance::default(), false)
    }

    /// With `sanitize`, eigenvalues in `[-tol.psd, 0)` are clipped to zero and
    /// the trace renormalised; anything more negative is still rejected.
    pub fn with_tolerance(m: CMatrix<T>, tol: Tolerance<T>, sanitize: bool) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        let defect = linalg::hermiticity_defect(&m);
        if defect > tol.trace {
            return Err(Error::NotHermitian { defect: to_f64(defect) });
        }
        let m = linalg::hermitian_part(&m);
        let tr = m.trace().re;
        if (tr - T::one()).abs() > tol.trace {
            return Err(Error::NotUnitTrace { trace: to_f64(tr) });
        }
        let (vals, vecs) = linalg::eigh(&m);
        if vals[0] < -tol.psd {
            return Err(Error::NotPsd { min_eigenvalue: to_f64(vals[0]) });
        }
        if sanitize && vals[0] < T::zero() {
            let clipped = vals.map(|x| if x < T::zero() { T::zero() } else { x });
            let total = clipped.sum();
            let d = DMatrix::from_diagonal(&clipped.map(|x| Complex::from(x / total)));
            return Ok(Self { m: &vecs * d * vecs.adjoint() });
        }
        Ok(Self { m })
    }

    /// Skips validation; for matrices that are states by construction.
    pub(crate) fn from_raw(m: CMatrix<T>) -> Self {
        Self { m }
    }

    pub fn pure(psi: &DVector<Complex<T>>) -> Result<Self> {
        let norm = psi.norm();
        if norm == T::zero() {
            return Err(Error::NotUnitTrace { trace: 0.0 });
        }
        let psi = psi / Complex::from(norm);
        Ok(Self { m: linalg::ket_bra(&psi, &psi) })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self { m: linalg::identity::<T>(n) / Complex::from(real::<T>(n as f64)) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.m
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> DVector<T> {
        linalg::eigvalsh(&self.m)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    /// Tr ρ².
    pub fn purity(&self) -> T {
        linalg::hs(&self.m, &self.m).re
    }

    /// U ρ U†.
    pub fn conjugate(&self, u: &CMatrix<T>) -> Self {
        Self { m: u * &self.m * u.adjoint() }
    }
}

pub fn make_density<T: Real>(entries: CMatrix<T>) -> Result<DensityMatrix<T>> {
    DensityMatrix::new(entries)
}

/// S(ρ) = −Tr ρ log ρ in nats, from the spectrum.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    entropy_of_spectrum(rho.eigenvalues().iter().copied())
}

pub(crate) fn entropy_of_spectrum<T: Real>(vals: impl Iterator<Item = T>) -> T {
    vals.filter(|&l| l > T::zero()).fold(T::zero(), |s, l| s - l * l.ln())
}

pub fn is_pure<T: Real>(rho: &DensityMatrix<T>) -> bool {
    let sq = &rho.m * &rho.m;
    linalg::max_abs(&(sq - &rho.m)) <= Tolerance::<T>::default().trace
}

/// Kronecker product ρ₁ ⊗ ρ₂.
pub fn tensor<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> DensityMatrix<T> {
    DensityMatrix { m: linalg::kron(&a.m, &b.m) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace of an operator on C^{n_A} ⊗ C^{n_B}, keeping one factor.
pub fn partial_trace_matrix<T: Real>(m: &CMatrix<T>, dims: (usize, usize), keep: Subsystem) -> Result<CMatrix<T>> {
    let (na, nb) = dims;
    if m.nrows() != na * nb || !m.is_square() {
        return Err(Error::DimensionMismatch { expected: na * nb, got: m.nrows() });
    }
    Ok(match keep {
        Subsystem::A => DMatrix::from_fn(na, na, |i, j| {
            (0..nb).fold(Complex::zero(), |s, k| s + m[(i * nb + k, j * nb + k)])
        }),
        Subsystem::B => DMatrix::from_fn(nb, nb, |i, j| {
            (0..na).fold(Complex::zero(), |s, k| s + m[(k * nb + i, k * nb + j)])
        }),
    })
}

pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, dims: (usize, usize), keep: Subsystem) -> Result<DensityMatrix<T>> {
    partial_trace_matrix(&rho.m, dims, keep).map(DensityMatrix::from_raw)
}

/// Qubit Bloch vector (ρ₁, ρ₂, ρ₃) with ρ = ½(1 + ρ⃗·σ⃗).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector<T: Real> {
    r: Vector3<T>,
}

impl<T: Real> BlochVector<T> {
    pub fn new(r: Vector3<T>) -> Result<Self> {
        let norm = r.norm();
        if norm > T::one() + Tolerance::<T>::default().trace {
            return Err(Error::BlochOutOfBall { norm: to_f64(norm) });
        }
        Ok(Self { r })
    }

    pub fn xyz(x: T, y: T, z: T) -> Result<Self> {
        Self::new(Vector3::new(x, y, z))
    }

    pub fn vector(&self) -> Vector3<T> {
        self.r
    }

    /// Coherence four-vector |ρ⟩ = (1, ρ₁, ρ₂, ρ₃).
    pub fn coherence(&self) -> Vector4<T> {
        Vector4::new(T::one(), self.r[0], self.r[1], self.r[2])
    }

    pub fn from_coherence(v: &Vector4<T>) -> Result<Self> {
        Self::new(Vector3::new(v[1], v[2], v[3]) / v[0])
    }

    /// Det ρ = (1 − ‖ρ⃗‖²)/4.
    pub fn determinant(&self) -> T {
        (T::one() - self.r.norm_squared()) * real(0.25)
    }
}

pub fn bloch_to_density<T: Real>(b: &BlochVector<T>) -> DensityMatrix<T> {
    DensityMatrix { m: bloch_operator(&b.r) }
}

/// ½(1 + r⃗·σ⃗) for any real r⃗.
pub(crate) fn bloch_operator<T: Real>(r: &Vector3<T>) -> CMatrix<T> {
    let s = linalg::pauli::<T>();
    let mut m = s[0].clone();
    for k in 0..3 {
        m += &s[k + 1] * Complex::from(r[k]);
    }
    m * Complex::from(real::<T>(0.5))
}

/// ρ_k = Tr(ρ σ_k) for any 2×2 operator.
pub(crate) fn bloch_components<T: Real>(m: &CMatrix<T>) -> Vector3<T> {
    let s = linalg::pauli::<T>();
    Vector3::from_fn(|k, _| (m * &s[k + 1]).trace().re)
}

pub fn density_to_bloch<T: Real>(rho: &DensityMatrix<T>) -> Result<BlochVector<T>> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit { dim: rho.dim() });
    }
    Ok(BlochVector { r: bloch_components(&rho.m) })
}

/// Computational-basis ket |k⟩ in C^n.
pub fn basis_ket<T: Real>(n: usize, k: usize) -> DVector<Complex<T>> {
    let mut v = DVector::zeros(n);
    v[k] = Complex::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(d: &[f64]) -> CMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(d.len(), d.iter().map(|&x| Complex::new(x, 0.0))))
    }

    fn singlet_like() -> CMatrix<f64> {
        // P₊ = |ψ⟩⟨ψ| with ψ = (|00⟩ + |11⟩)/√2
        let mut m = CMatrix::<f64>::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(i, j)] = Complex::new(0.5, 0.0);
        }
        m
    }

    #[test]
    fn validation() {
        let rho = make_density(diag(&[0.5, 0.5])).unwrap();
        let ev = rho.eigenvalues();
        assert!((ev[0] - 0.5).abs() < 1e-15 && (ev[1] - 0.5).abs() < 1e-15);

        let p = make_density(singlet_like()).unwrap();
        let ev = p.eigenvalues();
        assert!((ev[3] - 1.0).abs() < 1e-14 && ev[0].abs() < 1e-14);

        assert!(matches!(make_density(diag(&[1.2, -0.2])), Err(Error::NotPsd { .. })));
        assert!(matches!(make_density(diag(&[0.6, 0.6])), Err(Error::NotUnitTrace { .. })));
        let mut nh = diag(&[0.5, 0.5]);
        nh[(0, 1)] = Complex::new(0.1, 0.0);
        assert!(matches!(make_density(nh), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sanitize_clips_roundoff_only() {
        let m = diag(&[1.0 + 5e-11, -5e-11]);
        let rho = DensityMatrix::with_tolerance(m, Tolerance::default(), true).unwrap();
        assert!(rho.min_eigenvalue() >= 0.0);
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        let bad = diag(&[1.0 + 1e-6, -1e-6]);
        assert!(DensityMatrix::with_tolerance(bad, Tolerance::default(), true).is_err());
    }

    #[test]
    fn entropy_values() {
        let p = make_density(singlet_like()).unwrap();
        assert!(von_neumann_entropy(&p).abs() < 1e-12);
        for n in 2..6 {
            let s = von_neumann_entropy(&DensityMatrix::<f64>::maximally_mixed(n));
            assert!((s - (n as f64).ln()).abs() < 1e-12);
        }
        let rho = make_density(diag(&[0.75, 0.25])).unwrap();
        let expected = -0.75 * 0.75f64.ln() - 0.25 * 0.25f64.ln();
        assert!((von_neumann_entropy(&rho) - expected).abs() < 1e-14);
    }

    #[test]
    fn partial_traces() {
        let p = make_density(singlet_like()).unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&p, (2, 2), keep).unwrap();
            assert!((r.matrix() - diag(&[0.5, 0.5])).norm() < 1e-15);
        }
        assert!(partial_trace(&p, (2, 3), Subsystem::A).is_err());

        // index-sum oracle on a random 2⊗3 state
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random::density::<f64, _>(6, &mut rng);
        let rho = make_density(m.clone()).unwrap();
        let a = partial_trace(&rho, (2, 3), Subsystem::A).unwrap();
        let b = partial_trace(&rho, (2, 3), Subsystem::B).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Complex::new(0.0, 0.0);
                for k in 0..3 {
                    s += m[(3 * i + k, 3 * j + k)];
                }
                assert!((a.matrix()[(i, j)] - s).norm() < 1e-15);
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Complex::new(0.0, 0.0);
                for k in 0..2 {
                    s += m[(3 * k + i, 3 * k + j)];
                }
                assert!((b.matrix()[(i, j)] - s).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bloch_round_trip() {
        let z = bloch_to_density(&BlochVector::xyz(0.0, 0.0, 0.0).unwrap());
        assert!((z.matrix() - diag(&[0.5, 0.5])).norm() < 1e-15);
        let up = bloch_to_density(&BlochVector::xyz(0.0, 0.0, 1.0).unwrap());
        assert!((up.matrix() - diag(&[1.0, 0.0])).norm() < 1e-15);
        let b = BlochVector::<f64>::xyz(0.5, 0.5, 0.5).unwrap();
        let rho = bloch_to_density(&b);
        assert!((rho.matrix().determinant().re - 1.0 / 16.0).abs() < 1e-15);
        assert!((b.determinant() - 1.0 / 16.0).abs() < 1e-15);
        let back = density_to_bloch(&rho).unwrap();
        assert!((back.vector() - b.vector()).norm() < 1e-12);
        assert!(matches!(BlochVector::xyz(1.0, 0.5, 0.0), Err(Error::BlochOutOfBall { .. })));
    }

    #[test]
    fn tensor_products() {
        let h = DensityMatrix::<f64>::maximally_mixed(2);
        assert!((tensor(&h, &h).matrix() - diag(&[0.25; 4])).norm() < 1e-15);
        let a = make_density(diag(&[1.0, 0.0])).unwrap();
        let b = make_density(diag(&[0.0, 1.0])).unwrap();
        assert!((tensor(&a, &b).matrix() - diag(&[0.0, 1.0, 0.0, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn purity_checks() {
        assert!(is_pure(&make_density(singlet_like()).unwrap()));
        assert!(!is_pure(&DensityMatrix::<f64>::maximally_mixed(2)));
        let p = diag(&[1.0, 0.0]);
        let mixed = p * Complex::new(0.999, 0.0) + diag(&[0.5, 0.5]) * Complex::new(0.001, 0.0);
        let rho = make_density(mixed).unwrap();
        assert!(!is_pure(&rho));
        // eigenvalue oracle: 0.9995 and 0.0005, not {1, 0}
        let ev = rho.eigenvalues();
        assert!((ev[1] - 0.9995).abs() < 1e-14);
    }

    #[test]
    fn single_precision_works() {
        let rho = DensityMatrix::<f32>::maximally_mixed(3);
        assert!((von_neumann_entropy(&rho) - 3f32.ln()).abs() < 1e-5);
        let m = CMatrix::<f32>::from_diagonal(&DVector::from_vec(vec![Complex::new(0.25f32, 0.0), Complex::new(0.75, 0.0)]));
        assert!(make_density(m).is_ok());
    }
}
