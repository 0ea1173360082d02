//! Small dense helpers on complex matrices.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{real, CMatrix, Real};

/// σ₀ (identity), σ₁, σ₂, σ₃.
pub fn pauli<T: Real>() -> [CMatrix<T>; 4] {
    let o = Complex::<T>::zero();
    let l = Complex::<T>::one();
    let i = Complex::<T>::i();
    [
        DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    DMatrix::identity(n, n)
}

pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

pub fn trace<T: Real>(a: &CMatrix<T>) -> Complex<T> {
    a.trace()
}

/// Hilbert–Schmidt inner product Tr(A†B).
pub fn hs<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Complex<T> {
    a.iter().zip(b.iter()).fold(Complex::zero(), |s, (x, y)| s + x.conj() * y)
}

pub fn hermiticity_defect<T: Real>(a: &CMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let d = (a[(i, j)] - a[(j, i)].conj()).modulus();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn hermitian_part<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    (a + a.adjoint()) * Complex::from(real::<T>(0.5))
}

/// Eigen-decomposition of the hermitian part, eigenvalues ascending.
pub fn eigh<T: Real>(a: &CMatrix<T>) -> (DVector<T>, CMatrix<T>) {
    let n = a.nrows();
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals = DVector::from_iterator(n, idx.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = CMatrix::<T>::zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn eigvalsh<T: Real>(a: &CMatrix<T>) -> DVector<T> {
    eigh(a).0
}

pub fn min_eigenvalue<T: Real>(a: &CMatrix<T>) -> T {
    eigvalsh(a)[0]
}

/// f(A) for hermitian A through its spectrum.
pub fn hermitian_fn<T: Real>(a: &CMatrix<T>, f: impl Fn(T) -> T) -> CMatrix<T> {
    let (vals, vecs) = eigh(a);
    let d = DMatrix::from_diagonal(&vals.map(|x| Complex::from(f(x))));
    &vecs * d * vecs.adjoint()
}

pub fn max_abs<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |m, x| if x.modulus() > m { x.modulus() } else { m })
}

/// Outer product |a⟩⟨b|.
pub fn ket_bra<T: Real>(a: &DVector<Complex<T>>, b: &DVector<Complex<T>>) -> CMatrix<T> {
    a * b.adjoint()
}

/// Column-major vectorisation.
pub fn vec<T: Real>(a: &CMatrix<T>) -> DVector<Complex<T>> {
    DVector::from_column_slice(a.as_slice())
}

pub fn unvec<T: Real>(v: &DVector<Complex<T>>, n: usize) -> CMatrix<T> {
    DMatrix::from_column_slice(n, n, v.as_slice())
}

/// Non-identity Pauli strings σ_μ₁⊗…⊗σ_μₖ on k qubits, in lexicographic
/// order of (μ₁, …, μₖ). Unnormalised: Tr(P_i P_j) = 2ᵏ δ_ij.
pub fn pauli_strings<T: Real>(qubits: usize) -> Vec<CMatrix<T>> {
    let s = pauli::<T>();
    let mut out = vec![identity::<T>(1)];
    for _ in 0..qubits {
        out = out.iter().flat_map(|m| s.iter().map(move |p| kron(m, p))).collect();
    }
    out.remove(0);
    out
}

/// Generalised Gell-Mann basis: n²−1 hermitian, traceless, Tr(F_i F_j) = δ_ij.
///
/// For n = 2 this is σ/√2.
pub fn gell_mann<T: Real>(n: usize) -> Vec<CMatrix<T>> {
    let mut out = Vec::with_capacity(n * n - 1);
    let h = real::<T>(0.5).sqrt();
    let unit = |i: usize, j: usize| {
        let mut m = CMatrix::<T>::zeros(n, n);
        m[(i, j)] = Complex::one();
        m
    };
    // for n = 2 the order σ₁, σ₂, σ₃ falls out of the loops below
    for k in 0..n {
        for j in (k + 1)..n {
            let s = (unit(k, j) + unit(j, k)) * Complex::from(h);
            let a = (unit(k, j) * Complex::new(T::zero(), -h)) + unit(j, k) * Complex::new(T::zero(), h);
            out.push(s);
            out.push(a);
        }
    }
    for l in 1..n {
        let lf = real::<T>(l as f64);
        let norm = (lf * (lf + T::one())).sqrt().recip();
        let mut d = CMatrix::<T>::zeros(n, n);
        for i in 0..l {
            d[(i, i)] = Complex::from(norm);
        }
        d[(l, l)] = Complex::from(-lf * norm);
        out.push(d);
    }
    out
}
