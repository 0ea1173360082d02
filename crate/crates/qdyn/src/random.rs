//! Random states, unitaries and Kossakowski matrices for property checks.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::{real, CMatrix, Real};

pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(real(re), real(im))
    })
}

/// Haar-distributed unitary via QR of a Ginibre matrix.
pub fn unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let qr = ginibre::<T, R>(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.modulus() > T::zero() { d / Complex::from(d.modulus()) } else { Complex::from(T::one()) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

pub fn ket<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<Complex<T>> {
    let v = ginibre::<T, R>(n, 1, rng).column(0).into_owned();
    let norm = v.norm();
    v / Complex::from(norm)
}

/// Hilbert–Schmidt random density matrix (unit trace, PSD).
pub fn density<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let g = ginibre::<T, R>(n, n, rng);
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

/// Random PSD matrix of the given rank.
pub fn psd<T: Real, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> CMatrix<T> {
    let g = ginibre::<T, R>(n, rank, rng);
    &g * g.adjoint()
}

/// Random hermitian matrix with one prescribed negative eigenvalue.
pub fn hermitian_with_negative<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let u = unitary::<T, R>(n, rng);
    let mut d = DVector::<Complex<T>>::zeros(n);
    for k in 0..n {
        let x: f64 = rng.random_range(0.1..1.0);
        d[k] = Complex::from(real::<T>(if k == 0 { -x } else { x }));
    }
    &u * DMatrix::from_diagonal(&d) * u.adjoint()
}

pub fn hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let g = ginibre::<T, R>(n, n, rng);
    (&g + g.adjoint()) * Complex::from(real::<T>(0.5))
}
