//! Two-level atoms weakly coupled to a thermal massless scalar field.
//!
//! The atom Hamiltonian is H = (ω/2) n·σ. The renormalized frequency is taken
//! equal to ω and all Lamb-type Hamiltonian corrections are left out.

use nalgebra::{DVector, Matrix3, Vector3};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::lindblad::{BlochAffine, LindbladGenerator};
use crate::linalg::{eigh, identity, kron, pauli, trace};
use crate::ode::{integrate, OdeOptions};
use crate::states::{BlochVector, DensityMatrix};
use crate::CMatrix;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn half_integer_gamma(twice: u32) -> f64 {
    // Γ(twice/2) for twice ≥ 1
    let mut x = if twice % 2 == 0 { 1.0 } else { 0.5 };
    let mut g = if twice % 2 == 0 { 1.0 } else { PI.sqrt() };
    while 2.0 * x < twice as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Fourier transform of the thermal Wightman function of a massless scalar
/// field in d spacetime dimensions, with the cutoff removed.
///
/// At ζ = 0 the limit is returned: 1/(2πβ) for d = 4, 0 for d > 4; it
/// diverges for d < 4.
pub fn wightman_fourier(zeta: f64, beta: f64, d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::OutOfDomain(format!("dimension must be at least 2, got {d}")));
    }
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::OutOfDomain(format!("beta must be positive, got {beta}")));
    }
    let pre = 2.0 / ((4.0 * PI).powf((d as f64 - 1.0) / 2.0) * half_integer_gamma(d - 1)) * PI;
    if zeta == 0.0 {
        return match d {
            2 | 3 => Err(Error::OutOfDomain(format!("zero-frequency limit diverges for d = {d}"))),
            4 => Ok(if beta.is_finite() { pre / beta } else { 0.0 }),
            _ => Ok(0.0),
        };
    }
    // |ζ|^{d−2} π/ζ · 1/(1 − e^{−βζ})
    let planck = if beta.is_infinite() {
        if zeta > 0.0 { 1.0 } else { return Ok(0.0) }
    } else {
        1.0 / -(-beta * zeta).exp_m1()
    };
    Ok(pre * zeta.abs().powi(d as i32 - 2) / zeta * planck)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomParams {
    pub omega: f64,
    pub n: Vector3<f64>,
    /// Inverse temperature; `f64::INFINITY` is zero temperature.
    pub beta: f64,
}

impl AtomParams {
    pub fn new(omega: f64, n: Vector3<f64>, beta: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::OutOfDomain(format!("omega must be positive, got {omega}")));
        }
        if !(beta > 0.0) {
            return Err(Error::OutOfDomain(format!("beta must be positive, got {beta}")));
        }
        if (n.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfDomain(format!("n must be a unit vector, |n| = {}", n.norm())));
        }
        Ok(Self { omega, n, beta })
    }
}

/// Rates of the single-atom Kossakowski matrix A δ − iB ε·n + C n nᵀ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleAtomCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// B/A, the magnitude of the equilibrium Bloch vector.
    pub r: f64,
}

pub fn single_atom_coeffs(p: &AtomParams) -> SingleAtomCoeffs {
    let w = p.omega;
    if p.beta.is_infinite() {
        let a = w / (4.0 * PI);
        return SingleAtomCoeffs { a, b: a, c: -a, r: 1.0 };
    }
    let gp = wightman_fourier(w, p.beta, 4).unwrap();
    let gm = wightman_fourier(-w, p.beta, 4).unwrap();
    let g0 = wightman_fourier(0.0, p.beta, 4).unwrap();
    let a = 0.5 * (gp + gm);
    let b = 0.5 * (gp - gm);
    SingleAtomCoeffs { a, b, c: g0 - a, r: (0.5 * p.beta * w).tanh() }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// A δ_ij − iB ε_ijk n_k + C n_i n_j.
pub fn kossakowski_matrix(p: &AtomParams) -> Matrix3<Complex64> {
    let k = single_atom_coeffs(p);
    let n = p.n;
    Matrix3::from_fn(|i, j| {
        let eps: f64 = (0..3).map(|l| levi_civita(i, j, l) * n[l]).sum();
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new(k.a * delta + k.c * n[i] * n[j], -k.b * eps)
    })
}

pub fn single_atom_generator(p: &AtomParams) -> LindbladGenerator<f64> {
    LindbladGenerator::qubit(p.n * (p.omega / 2.0), kossakowski_matrix(p))
}

/// Bloch form: a = 2A + C(n₂² + n₃²), b = −C n₁n₂, …, drift (u, v, w) = 2B n.
pub fn single_atom_bloch(p: &AtomParams) -> BlochAffine<f64> {
    let k = single_atom_coeffs(p);
    let n = p.n;
    let diag = |i: usize| 2.0 * k.a + k.c * (1.0 - n[i] * n[i]);
    BlochAffine::from_params(
        n * (p.omega / 2.0),
        diag(0),
        -k.c * n[0] * n[1],
        -k.c * n[0] * n[2],
        diag(1),
        -k.c * n[1] * n[2],
        diag(2),
        n * (2.0 * k.b),
    )
}

/// Probability of finding the state ρ_f at time t starting from ρ_i.
pub fn transition_probability(p: &AtomParams, rho_i: &BlochVector<f64>, rho_f: &BlochVector<f64>, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    let k = single_atom_coeffs(p);
    let (ri, rf, n) = (rho_i.vector(), rho_f.vector(), p.n);
    let (in_, fn_) = (ri.dot(&n), rf.dot(&n));
    let e1 = (-4.0 * k.a * t).exp();
    let e2 = (-2.0 * (2.0 * k.a + k.c) * t).exp();
    let (s, co) = (p.omega * t).sin_cos();
    let value = 0.5
        * (1.0 - fn_ * (1.0 - e1) * k.r
            + e1 * in_ * fn_
            + e2 * ((ri.dot(&rf) - in_ * fn_) * co + n.dot(&ri.cross(&rf)) * s));
    Ok(value)
}

/// Σᵢ = σᵢ⊗1 + 1⊗σᵢ.
pub fn sigma_ops() -> [CMatrix<f64>; 3] {
    let s = pauli::<f64>();
    let id = identity::<f64>(2);
    std::array::from_fn(|i| kron(&s[i + 1], &id) + kron(&id, &s[i + 1]))
}

/// S_ij = σᵢ⊗σⱼ + σⱼ⊗σᵢ.
pub fn s_ops() -> [[CMatrix<f64>; 3]; 3] {
    let s = pauli::<f64>();
    std::array::from_fn(|i| std::array::from_fn(|j| kron(&s[i + 1], &s[j + 1]) + kron(&s[j + 1], &s[i + 1])))
}

/// P = ¼(1 − S/2) with S = Σᵢ Sᵢᵢ, the singlet projector, and Q = 1 − P.
pub fn projectors() -> (CMatrix<f64>, CMatrix<f64>) {
    let s = s_ops();
    let total = &s[0][0] + &s[1][1] + &s[2][2];
    let id = identity::<f64>(4);
    let p = (&id - total * c(0.5)) * c(0.25);
    let q = id - &p;
    (p, q)
}

/// Σ 𝒜_ij [Σⱼ ρ Σᵢ − ½{ΣᵢΣⱼ, ρ}] with 𝒜 the single-atom matrix, written on
/// the basis σ_μ⊗σ_ν / 2. No Hamiltonian part.
pub fn two_atom_generator(p: &AtomParams) -> LindbladGenerator<f64> {
    let s = pauli::<f64>();
    let mut basis = Vec::with_capacity(15);
    for mu in 0..4 {
        for nu in 0..4 {
            if mu + nu > 0 {
                basis.push(kron(&s[mu], &s[nu]) * c(0.5));
            }
        }
    }
    // σᵢ⊗1 is basis index 4i − 1, 1⊗σᵢ is index i − 1
    let slots = |i: usize| [4 * (i + 1) - 1, i];
    let a = kossakowski_matrix(p);
    let mut k = CMatrix::<f64>::zeros(15, 15);
    for i in 0..3 {
        for j in 0..3 {
            for x in slots(i) {
                for y in slots(j) {
                    k[(x, y)] += a[(i, j)] * 4.0;
                }
            }
        }
    }
    LindbladGenerator::new(CMatrix::zeros(4, 4), k, basis).expect("Pauli-product basis")
}

/// ρ = ¼[1⊗1 + Σ ρ₀ᵢ 1⊗σᵢ + Σ ρᵢ₀ σᵢ⊗1 + Σ ρᵢⱼ σᵢ⊗σⱼ].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoAtomState {
    /// ρ₀ᵢ, second atom.
    pub v1: Vector3<f64>,
    /// ρᵢ₀, first atom.
    pub v2: Vector3<f64>,
    pub m: Matrix3<f64>,
}

impl TwoAtomState {
    /// Checks that the reconstructed matrix is a density matrix.
    pub fn new(v1: Vector3<f64>, v2: Vector3<f64>, m: Matrix3<f64>) -> Result<Self> {
        let s = Self { v1, v2, m };
        s.density()?;
        Ok(s)
    }

    pub fn tau(&self) -> f64 {
        self.m.trace()
    }

    pub fn to_matrix(&self) -> CMatrix<f64> {
        let s = pauli::<f64>();
        let mut r = identity::<f64>(4);
        for i in 0..3 {
            r += kron(&s[0], &s[i + 1]) * c(self.v1[i]);
            r += kron(&s[i + 1], &s[0]) * c(self.v2[i]);
            for j in 0..3 {
                r += kron(&s[i + 1], &s[j + 1]) * c(self.m[(i, j)]);
            }
        }
        r * c(0.25)
    }

    pub fn density(&self) -> Result<DensityMatrix<f64>> {
        DensityMatrix::new(self.to_matrix())
    }

    /// Components Tr[ρ σ_μ⊗σ_ν] of any 4×4 matrix (real parts).
    pub fn from_matrix(rho: &CMatrix<f64>) -> Result<Self> {
        if rho.nrows() != 4 || rho.ncols() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: rho.nrows() });
        }
        let s = pauli::<f64>();
        let comp = |mu: usize, nu: usize| trace(&(rho * kron(&s[mu], &s[nu]))).re;
        Ok(Self {
            v1: Vector3::from_fn(|i, _| comp(0, i + 1)),
            v2: Vector3::from_fn(|i, _| comp(i + 1, 0)),
            m: Matrix3::from_fn(|i, j| comp(i + 1, j + 1)),
        })
    }

    /// ρ_x ⊗ ρ_y for Bloch vectors x (first atom) and y (second).
    pub fn product(x: &BlochVector<f64>, y: &BlochVector<f64>) -> Self {
        let (x, y) = (x.vector(), y.vector());
        Self { v1: y, v2: x, m: x * y.transpose() }
    }

    /// The singlet projector P.
    pub fn singlet() -> Self {
        Self { v1: Vector3::zeros(), v2: Vector3::zeros(), m: -Matrix3::identity() }
    }

    /// (ε/4) 1 + (1 − ε) P.
    pub fn singlet_mixture(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::OutOfDomain(format!("mixing weight must lie in [0, 1], got {eps}")));
        }
        Ok(Self { v1: Vector3::zeros(), v2: Vector3::zeros(), m: -Matrix3::identity() * (1.0 - eps) })
    }

    pub fn to_vector(&self) -> DVector<f64> {
        let mut v = DVector::zeros(15);
        for i in 0..3 {
            v[i] = self.v1[i];
            v[3 + i] = self.v2[i];
            for j in 0..3 {
                v[6 + 3 * i + j] = self.m[(i, j)];
            }
        }
        v
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        Self {
            v1: Vector3::new(v[0], v[1], v[2]),
            v2: Vector3::new(v[3], v[4], v[5]),
            m: Matrix3::from_fn(|i, j| v[6 + 3 * i + j]),
        }
    }

    pub fn concurrence(&self) -> Result<f64> {
        concurrence(&self.density()?)
    }
}

/// Time derivative of the components under the two-atom dissipator.
pub fn two_atom_rhs(p: &AtomParams, s: &TwoAtomState) -> TwoAtomState {
    let k = single_atom_coeffs(p);
    let (a, b, cc) = (k.a, k.b, k.c);
    let n = p.n;
    let tau = s.tau();
    let m = &s.m;
    let nn = n * n.transpose();
    let decay = Matrix3::identity() * (2.0 * a + cc) - nn * cc;
    let drift = n * (-2.0 * b * (2.0 + tau));
    let d1 = -2.0 * (decay * s.v1 - m * n * b) + drift;
    let d2 = -2.0 * (decay * s.v2 - m.transpose() * n * b) + drift;
    let nmn = n.dot(&(m * n));
    let dm = Matrix3::from_fn(|i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        let mut x = -4.0 * ((2.0 * a + cc) * m[(i, j)] + (a + cc) * m[(j, i)] - ((a + cc) * delta - cc * n[i] * n[j]) * tau);
        x -= 4.0 * b * (n[i] * s.v1[j] + n[j] * s.v2[i]);
        x -= 2.0 * b * (n[i] * s.v2[j] + n[j] * s.v1[i]);
        for l in 0..3 {
            x += 2.0
                * (b * delta * n[l] * (s.v2[l] + s.v1[l])
                    + cc * n[i] * n[l] * (m[(l, j)] + 2.0 * m[(j, l)])
                    + cc * n[j] * n[l] * (m[(i, l)] + 2.0 * m[(l, i)]));
        }
        x - 4.0 * cc * delta * nmn
    });
    TwoAtomState { v1: d1, v2: d2, m: dm }
}

/// Integrates the component equations on `grid` (ascending, starting at the
/// initial time).
pub fn evolve_two_atom(p: &AtomParams, s0: &TwoAtomState, grid: &[f64]) -> Result<Vec<TwoAtomState>> {
    let opts = OdeOptions { rtol: 1e-10, atol: 1e-13, ..OdeOptions::default() };
    let f = |_t: f64, y: &DVector<f64>| two_atom_rhs(p, &TwoAtomState::from_vector(y)).to_vector();
    let ys = integrate(f, &s0.to_vector(), grid, &opts)?;
    Ok(ys.iter().map(TwoAtomState::from_vector).collect())
}

fn check_tau(tau: f64) -> Result<()> {
    if (-3.0 - 1e-12..=1.0 + 1e-12).contains(&tau) {
        Ok(())
    } else {
        Err(Error::TauOutOfRange { tau })
    }
}

/// The stationary state reached from any initial state with Tr ρᵢⱼ = τ.
pub fn asymptotic_state(tau: f64, r: f64, n: &Vector3<f64>) -> Result<TwoAtomState> {
    check_tau(tau)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::OutOfDomain(format!("R must lie in [0, 1], got {r}")));
    }
    let den = 3.0 + r * r;
    let v = n * (-r * (tau + 3.0) / den);
    let m = (Matrix3::identity() * (tau - r * r) + n * n.transpose() * (r * r * (tau + 3.0))) / den;
    Ok(TwoAtomState { v1: v, v2: v, m })
}

pub fn asymptotic_concurrence(tau: f64, r: f64) -> Result<f64> {
    check_tau(tau)?;
    let r2 = r * r;
    Ok(((3.0 - r2) / (2.0 * (3.0 + r2)) * ((5.0 * r2 - 3.0) / (3.0 - r2) - tau)).max(0.0))
}

/// P ρ̂₀ P / Tr[P ρ̂₀ P] · Tr[P ρ(0)] + (same with Q), with ρ̂₀ = ρ_eq ⊗ ρ_eq.
pub fn asymptote_from_projectors(p: &AtomParams, rho0: &CMatrix<f64>) -> Result<CMatrix<f64>> {
    if rho0.nrows() != 4 || rho0.ncols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho0.nrows() });
    }
    let r = single_atom_coeffs(p).r;
    let s = pauli::<f64>();
    let single = (identity::<f64>(2) - (&s[1] * c(p.n[0]) + &s[2] * c(p.n[1]) + &s[3] * c(p.n[2])) * c(r)) * c(0.5);
    let hat0 = kron(&single, &single);
    let (pp, qq) = projectors();
    let mut out = CMatrix::zeros(4, 4);
    for proj in [&pp, &qq] {
        let block = proj * &hat0 * proj;
        out += &block * (trace(&(proj * rho0)) / trace(&block));
    }
    Ok(out)
}

/// Outcome of the initial-entanglement test ⟨u|𝒜|u⟩⟨v|𝒞ᵀ|v⟩ < |⟨u|(Re ℬ + iH)|v⟩|².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntanglementTest {
    pub fires: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl EntanglementTest {
    /// rhs − lhs; positive when the test fires.
    pub fn statistic(&self) -> f64 {
        self.rhs - self.lhs
    }
}

fn pure_ket(rho: &DensityMatrix<f64>) -> Result<(DVector<Complex64>, DVector<Complex64>)> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit { dim: rho.dim() });
    }
    let purity = rho.purity();
    if (purity - 1.0).abs() > 1e-9 {
        return Err(Error::InputNotPure { purity });
    }
    let (_, vecs) = eigh(rho.matrix());
    Ok((vecs.column(1).into_owned(), vecs.column(0).into_owned()))
}

/// ⟨a|σᵢ|b⟩ for i = 1..3.
fn sandwich(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Vector3<Complex64> {
    let s = pauli::<f64>();
    Vector3::from_fn(|i, _| a.dotc(&(&s[i + 1] * b)))
}

fn form(u: &Vector3<Complex64>, m: &Matrix3<Complex64>, v: &Vector3<Complex64>) -> Complex64 {
    u.dotc(&(m * v))
}

/// General test with Kossakowski blocks 𝒜, ℬ, 𝒞 and two-atom Hamiltonian
/// H⁽¹²⁾, for the initial product state |φ⟩⟨φ| ⊗ |ψ⟩⟨ψ|.
///
/// u = ⟨φ̃|σ|φ⟩ and v = ⟨ψ|σ|ψ̃⟩ with φ̃, ψ̃ the orthogonal states; both are
/// normalized to unit length.
pub fn entanglement_generation_test_general(
    a: &Matrix3<Complex64>,
    b: &Matrix3<Complex64>,
    cm: &Matrix3<Complex64>,
    h12: &Matrix3<f64>,
    phi: &DensityMatrix<f64>,
    psi: &DensityMatrix<f64>,
) -> Result<EntanglementTest> {
    let (f, ft) = pure_ket(phi)?;
    let (g, gt) = pure_ket(psi)?;
    let u = sandwich(&ft, &f);
    let v = sandwich(&g, &gt);
    let u = u / c(u.norm());
    let v = v / c(v.norm());
    let lhs = (form(&u, a, &u) * form(&v, &cm.transpose(), &v)).re;
    let mixed = b.map(|x| c(x.re)) + h12.map(|x| Complex64::new(0.0, x));
    let rhs = form(&u, &mixed, &v).norm_sqr();
    Ok(EntanglementTest { fires: lhs < rhs, lhs, rhs })
}

/// The test with 𝒜 = ℬ = 𝒞 the single-atom matrix and H⁽¹²⁾ = 0.
pub fn entanglement_generation_test(p: &AtomParams, phi: &DensityMatrix<f64>, psi: &DensityMatrix<f64>) -> Result<EntanglementTest> {
    let a = kossakowski_matrix(p);
    entanglement_generation_test_general(&a, &a, &a, &Matrix3::zeros(), phi, psi)
}
