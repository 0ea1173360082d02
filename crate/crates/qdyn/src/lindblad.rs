//! Kossakowski–Lindblad generators, their qubit Bloch form and CP ledger.

use nalgebra::{ComplexField, DMatrix, DVector, Matrix3, Matrix4, Vector3, Vector4, SVD};
use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::CpVerdict;
use crate::error::{Error, Result};
use crate::linalg;
use crate::ode::{self, OdeOptions};
use crate::scalar::{real, to_f64, tol, CMatrix, Real};
use crate::states::{bloch_components, bloch_operator, DensityMatrix};

/// 𝕃[ρ] = −i[H,ρ] + Σ C_ij (F_j† ρ F_i − ½{F_i F_j†, ρ}).
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladGenerator<T: Real> {
    h: CMatrix<T>,
    c: CMatrix<T>,
    basis: Vec<CMatrix<T>>,
}

impl<T: Real> LindbladGenerator<T> {
    pub fn new(h: CMatrix<T>, c: CMatrix<T>, basis: Vec<CMatrix<T>>) -> Result<Self> {
        let n = h.nrows();
        if !h.is_square() {
            return Err(Error::DimensionMismatch { expected: n, got: h.ncols() });
        }
        let m = n * n - 1;
        if basis.len() != m {
            return Err(Error::InvalidBasis { reason: format!("{} elements, need {}", basis.len(), m) });
        }
        if c.nrows() != m || c.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, got: c.nrows() });
        }
        for (i, f) in basis.iter().enumerate() {
            if f.nrows() != n || f.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: f.nrows() });
            }
            if f.trace().modulus() > tol(1e-9) {
                return Err(Error::InvalidBasis { reason: format!("F_{} is not traceless", i) });
            }
            for (j, g) in basis.iter().enumerate().take(i + 1) {
                let ip = linalg::hs(f, g);
                let target = if i == j { T::one() } else { T::zero() };
                if (ip - Complex::from(target)).modulus() > tol(1e-9) {
                    return Err(Error::InvalidBasis { reason: format!("Tr(F_{}†F_{}) = {}", i, j, to_f64(ip.re)) });
                }
            }
        }
        for (mat, _name) in [(&h, "H"), (&c, "C")] {
            let d = linalg::hermiticity_defect(mat);
            if d > tol(1e-9) {
                return Err(Error::NotHermitian { defect: to_f64(d) });
            }
        }
        Ok(Self { h, c, basis })
    }

    /// Over the generalised Gell-Mann basis (σ/√2 for qubits).
    pub fn with_gell_mann(h: CMatrix<T>, c: CMatrix<T>) -> Result<Self> {
        let n = h.nrows();
        Self::new(h, c, linalg::gell_mann(n))
    }

    /// Qubit generator in the σ-convention: H = ω⃗·σ⃗ and
    /// 𝔻[ρ] = Σ c_ij (σ_j ρ σ_i − ½{σ_i σ_j, ρ}).
    pub fn qubit(omega: Vector3<T>, c_pauli: Matrix3<Complex<T>>) -> Self {
        let s = linalg::pauli::<T>();
        let mut h = CMatrix::<T>::zeros(2, 2);
        for k in 0..3 {
            h += &s[k + 1] * Complex::from(omega[k]);
        }
        let two = Complex::from(real::<T>(2.0));
        let c = DMatrix::from_fn(3, 3, |i, j| c_pauli[(i, j)] * two);
        Self { h, c, basis: linalg::gell_mann(2) }
    }

    /// 𝕃[ρ] = Σ σ_i ρ σ_i − 3ρ.
    pub fn depolarizing() -> Self {
        Self::qubit(Vector3::zeros(), Matrix3::identity())
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn hamiltonian(&self) -> &CMatrix<T> {
        &self.h
    }

    pub fn kossakowski(&self) -> &CMatrix<T> {
        &self.c
    }

    pub fn basis(&self) -> &[CMatrix<T>] {
        &self.basis
    }

    fn anticommutator_kernel(&self) -> CMatrix<T> {
        let n = self.dim();
        let mut k = CMatrix::<T>::zeros(n, n);
        for (i, fi) in self.basis.iter().enumerate() {
            for (j, fj) in self.basis.iter().enumerate() {
                let cij = self.c[(i, j)];
                if cij != Complex::zero() {
                    k += fi * fj.adjoint() * cij;
                }
            }
        }
        k
    }
}

/// 𝕃 on column-major vectorised matrices: vec(AXB) = (Bᵀ⊗A) vec X.
pub fn superoperator<T: Real>(g: &LindbladGenerator<T>) -> CMatrix<T> {
    let n = g.dim();
    let id = linalg::identity::<T>(n);
    let mi = Complex::new(T::zero(), -T::one());
    let mut l = (id.kronecker(&g.h) - g.h.transpose().kronecker(&id)) * mi;
    for (i, fi) in g.basis.iter().enumerate() {
        for (j, fj) in g.basis.iter().enumerate() {
            let cij = g.c[(i, j)];
            if cij != Complex::zero() {
                l += fi.transpose().kronecker(&fj.adjoint()) * cij;
            }
        }
    }
    let k = g.anticommutator_kernel() * Complex::from(real::<T>(0.5));
    l -= id.kronecker(&k) + k.transpose().kronecker(&id);
    l
}

pub fn apply_generator<T: Real>(g: &LindbladGenerator<T>, x: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = g.dim();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.nrows() });
    }
    let mi = Complex::new(T::zero(), -T::one());
    let mut out = (&g.h * x - x * &g.h) * mi;
    for (i, fi) in g.basis.iter().enumerate() {
        for (j, fj) in g.basis.iter().enumerate() {
            let cij = g.c[(i, j)];
            if cij != Complex::zero() {
                out += fj.adjoint() * x * fi * cij;
            }
        }
    }
    let k = g.anticommutator_kernel() * Complex::from(real::<T>(0.5));
    out -= &k * x + x * &k;
    Ok(out)
}

pub fn is_cp_generator<T: Real>(g: &LindbladGenerator<T>) -> CpVerdict<T> {
    let min = linalg::min_eigenvalue(&g.c);
    CpVerdict { completely_positive: min >= -tol::<T>(1e-10), min_eigenvalue: min }
}

/// exp(t𝕃) as an n²×n² matrix.
pub fn propagator<T: Real>(g: &LindbladGenerator<T>, t: T) -> Result<CMatrix<T>> {
    if t < T::zero() {
        return Err(Error::NegativeTime { t: to_f64(t) });
    }
    Ok((superoperator(g) * Complex::from(t)).exp())
}

/// ρ(t) = exp(t𝕃)ρ₀. The result is returned as a plain operator: a
/// generator that is not positivity preserving can leave the state space.
pub fn evolve<T: Real>(g: &LindbladGenerator<T>, rho0: &DensityMatrix<T>, t: T) -> Result<CMatrix<T>> {
    evolve_operator(g, rho0.matrix(), t)
}

pub fn evolve_operator<T: Real>(g: &LindbladGenerator<T>, x: &CMatrix<T>, t: T) -> Result<CMatrix<T>> {
    let n = g.dim();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.nrows() });
    }
    let p = propagator(g, t)?;
    Ok(linalg::unvec(&(p * linalg::vec(x)), n))
}

pub fn trajectory<T: Real>(g: &LindbladGenerator<T>, rho0: &DensityMatrix<T>, grid: &[T]) -> Result<Vec<CMatrix<T>>> {
    let l = superoperator(g);
    let v0 = linalg::vec(rho0.matrix());
    let n = g.dim();
    grid.iter()
        .map(|&t| {
            if t < T::zero() {
                return Err(Error::NegativeTime { t: to_f64(t) });
            }
            Ok(linalg::unvec(&((&l * Complex::from(t)).exp() * &v0), n))
        })
        .collect()
}

/// Same flow by adaptive Runge–Kutta on the vectorised equation.
pub fn evolve_ode<T: Real>(g: &LindbladGenerator<T>, rho0: &DensityMatrix<T>, t: T, opts: &OdeOptions) -> Result<CMatrix<T>> {
    if t < T::zero() {
        return Err(Error::NegativeTime { t: to_f64(t) });
    }
    let l = superoperator(g);
    let ys = ode::integrate(|_, y: &DVector<Complex<T>>| &l * y, &linalg::vec(rho0.matrix()), &[T::zero(), t], opts)?;
    Ok(linalg::unvec(&ys[1], g.dim()))
}

/// (γ¹_t ⊗ γ²_t)[X] on C^{n₁}⊗C^{n₂}.
pub fn product_evolve<T: Real>(g1: &LindbladGenerator<T>, g2: &LindbladGenerator<T>, x: &CMatrix<T>, t: T) -> Result<CMatrix<T>> {
    let (n1, n2) = (g1.dim(), g2.dim());
    if x.nrows() != n1 * n2 {
        return Err(Error::DimensionMismatch { expected: n1 * n2, got: x.nrows() });
    }
    let p1 = propagator(g1, t)?;
    let p2 = propagator(g2, t)?;
    let mut y = CMatrix::<T>::zeros(n1 * n2, n1 * n2);
    for a in 0..n1 {
        for b in 0..n1 {
            for i in 0..n2 {
                for j in 0..n2 {
                    let xv = x[(a * n2 + i, b * n2 + j)];
                    if xv == Complex::zero() {
                        continue;
                    }
                    for c in 0..n1 {
                        for d in 0..n1 {
                            let w1 = p1[(c + d * n1, a + b * n1)] * xv;
                            for k in 0..n2 {
                                for l in 0..n2 {
                                    y[(c * n2 + k, d * n2 + l)] += w1 * p2[(k + l * n2, i + j * n2)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(y)
}

/// Null space of 𝕃 and the stationary state reached from 1/n.
#[derive(Clone, Debug)]
pub struct Stationary<T: Real> {
    /// Hermitian, Hilbert–Schmidt orthonormal basis of ker 𝕃.
    pub basis: Vec<CMatrix<T>>,
    /// Component of 1/n in ker 𝕃 along ran 𝕃; unit trace.
    pub state: CMatrix<T>,
}

pub fn stationary_states<T: Real>(g: &LindbladGenerator<T>) -> Stationary<T> {
    let n = g.dim();
    let l = superoperator(g);
    let svd = SVD::new(l.clone(), true, true);
    let smax = svd.singular_values.iter().fold(T::zero(), |m, &s| m.max(s));
    let cut = smax * real(1e-10);
    let vt = svd.v_t.as_ref().unwrap();
    let null: Vec<CMatrix<T>> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= cut)
        .map(|k| linalg::unvec(&vt.row(k).adjoint(), n))
        .collect();
    let mut basis: Vec<CMatrix<T>> = Vec::new();
    let half = Complex::from(real::<T>(0.5));
    let mhalf_i = Complex::new(T::zero(), real(-0.5));
    for x in &null {
        for cand in [(x + x.adjoint()) * half, (x - x.adjoint()) * mhalf_i] {
            if basis.len() == null.len() {
                break;
            }
            let mut v = cand;
            for b in &basis {
                let p = linalg::hs(b, &v);
                v -= b * p;
            }
            let norm = linalg::hs(&v, &v).re.sqrt();
            if norm > real(1e-8) {
                basis.push(v / Complex::from(norm));
            }
        }
    }
    // 1/n = Σ a_k N_k + 𝕃y; the N-part is the stationary state
    let k = basis.len();
    let mut sys = CMatrix::<T>::zeros(n * n, k + n * n);
    for (j, b) in basis.iter().enumerate() {
        sys.set_column(j, &linalg::vec(b));
    }
    sys.view_mut((0, k), (n * n, n * n)).copy_from(&l);
    let rhs = linalg::vec(&(linalg::identity::<T>(n) / Complex::from(real::<T>(n as f64))));
    let z = SVD::new(sys, true, true).solve(&rhs, real(1e-12)).expect("U and V were computed");
    let mut state = CMatrix::<T>::zeros(n, n);
    for (j, b) in basis.iter().enumerate() {
        state += b * z[j];
    }
    state = linalg::hermitian_part(&state);
    let tr = state.trace();
    if tr.modulus() > real(1e-12) {
        state /= tr;
    }
    Stationary { basis, state }
}

/// Qubit dynamics ∂ₜ|ρ⟩ = −2(ℋ + 𝒟)|ρ⟩ on |ρ⟩ = (1, ρ₁, ρ₂, ρ₃).
///
/// ℋ carries ω⃗ in its antisymmetric block; 𝒟 is
/// `[[0,0,0,0],[u,a,b,c],[v,b,α,β],[w,c,β,γ]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochAffine<T: Real> {
    hmat: Matrix4<T>,
    dmat: Matrix4<T>,
}

fn hamiltonian_block<T: Real>(w: &Vector3<T>) -> Matrix4<T> {
    let z = T::zero();
    Matrix4::new(z, z, z, z, z, z, w[2], -w[1], z, -w[2], z, w[0], z, w[1], -w[0], z)
}

impl<T: Real> BlochAffine<T> {
    /// The antisymmetric part of the 3×3 block of `d` is moved into ℋ.
    pub fn new(omega: Vector3<T>, d: Matrix4<T>) -> Result<Self> {
        let scale = d.amax().max(T::one());
        if (0..4).any(|j| d[(0, j)].abs() > tol::<T>(1e-12) * scale) {
            return Err(Error::OutOfDomain("first row of 𝒟 must vanish".into()));
        }
        let half = real::<T>(0.5);
        let anti = |i: usize, j: usize| (d[(i, j)] - d[(j, i)]) * half;
        let w = omega + Vector3::new(anti(2, 3), -anti(1, 3), anti(1, 2));
        let mut dmat = d;
        for i in 1..4 {
            for j in 1..4 {
                dmat[(i, j)] = (d[(i, j)] + d[(j, i)]) * half;
            }
        }
        for j in 0..4 {
            dmat[(0, j)] = T::zero();
        }
        Ok(Self { hmat: hamiltonian_block(&w), dmat })
    }

    /// From the nine 𝒟 parameters; u, v, w default to the unital case.
    #[allow(clippy::too_many_arguments)]
    pub fn from_params(omega: Vector3<T>, a: T, b: T, c: T, alpha: T, beta: T, gamma: T, drift: Vector3<T>) -> Self {
        let z = T::zero();
        let d = Matrix4::new(z, z, z, z, drift[0], a, b, c, drift[1], b, alpha, beta, drift[2], c, beta, gamma);
        Self { hmat: hamiltonian_block(&omega), dmat: d }
    }

    pub fn hamiltonian_matrix(&self) -> &Matrix4<T> {
        &self.hmat
    }

    pub fn dissipator_matrix(&self) -> &Matrix4<T> {
        &self.dmat
    }

    pub fn omega(&self) -> Vector3<T> {
        Vector3::new(self.hmat[(2, 3)], self.hmat[(3, 1)], self.hmat[(1, 2)])
    }

    /// Symmetric block 𝒟^(3).
    pub fn d3(&self) -> Matrix3<T> {
        self.dmat.fixed_view::<3, 3>(1, 1).into_owned()
    }

    /// (u, v, w).
    pub fn drift(&self) -> Vector3<T> {
        self.dmat.fixed_view::<3, 1>(1, 0).into_owned()
    }

    pub fn a(&self) -> T {
        self.dmat[(1, 1)]
    }
    pub fn b(&self) -> T {
        self.dmat[(1, 2)]
    }
    pub fn c(&self) -> T {
        self.dmat[(1, 3)]
    }
    pub fn alpha(&self) -> T {
        self.dmat[(2, 2)]
    }
    pub fn beta(&self) -> T {
        self.dmat[(2, 3)]
    }
    pub fn gamma(&self) -> T {
        self.dmat[(3, 3)]
    }

    /// −2(ℋ + 𝒟).
    pub fn rate_matrix(&self) -> Matrix4<T> {
        (self.hmat + self.dmat) * real::<T>(-2.0)
    }

    pub fn flow(&self, v: &Vector4<T>, t: T) -> Vector4<T> {
        (self.rate_matrix() * t).exp() * v
    }

    /// Solves (ℋ+𝒟)|ρ⟩ = 0 with ρ₀ = 1, when the 3×3 block is invertible.
    pub fn stationary_bloch(&self) -> Option<Vector3<T>> {
        let k = self.hmat + self.dmat;
        let block: Matrix3<T> = k.fixed_view::<3, 3>(1, 1).into_owned();
        let col: Vector3<T> = k.fixed_view::<3, 1>(1, 0).into_owned();
        block.lu().solve(&(-col))
    }

    /// Kossakowski matrix in the σ-convention of [`LindbladGenerator::qubit`].
    pub fn kossakowski_pauli(&self) -> Matrix3<Complex<T>> {
        let half = real::<T>(0.5);
        let (a, b, c, al, be, ga) = (self.a(), self.b(), self.c(), self.alpha(), self.beta(), self.gamma());
        let re = Matrix3::new(
            (al + ga - a) * half, -b, -c,
            -b, (a + ga - al) * half, -be,
            -c, -be, (a + al - ga) * half,
        );
        // C_ij ∋ −(i/2) ε_ijk D_k0
        let m = self.drift() * half;
        let z = T::zero();
        let im = Matrix3::new(z, -m[2], m[1], m[2], z, -m[0], -m[1], m[0], z);
        Matrix3::from_fn(|i, j| Complex::new(re[(i, j)], im[(i, j)]))
    }
}

pub fn to_bloch_affine<T: Real>(g: &LindbladGenerator<T>) -> Result<BlochAffine<T>> {
    if g.dim() != 2 {
        return Err(Error::NotQubit { dim: g.dim() });
    }
    let s = linalg::pauli::<T>();
    let half = real::<T>(0.5);
    let mut m = Matrix4::<T>::zeros();
    for nu in 0..4 {
        let img = apply_generator(g, &s[nu])?;
        for mu in 0..4 {
            m[(mu, nu)] = (&s[mu] * &img).trace().re * half;
        }
    }
    let k = m * real::<T>(-0.5);
    let mut d = k;
    for i in 1..4 {
        for j in 1..4 {
            d[(i, j)] = (k[(i, j)] + k[(j, i)]) * half;
        }
    }
    let anti = |i: usize, j: usize| (k[(i, j)] - k[(j, i)]) * half;
    let omega = Vector3::new(anti(2, 3), anti(3, 1), anti(1, 2));
    for j in 0..4 {
        d[(0, j)] = T::zero();
    }
    Ok(BlochAffine { hmat: hamiltonian_block(&omega), dmat: d })
}

pub fn from_bloch_affine<T: Real>(d: &BlochAffine<T>) -> LindbladGenerator<T> {
    LindbladGenerator::qubit(d.omega(), d.kossakowski_pauli())
}

/// R, S, T and the named inequalities for complete positivity and the
/// necessary positivity conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpLedger<T> {
    pub r: T,
    pub s: T,
    pub t: T,
    pub r_nonneg: bool,
    pub s_nonneg: bool,
    pub t_nonneg: bool,
    pub rs_ge_b2: bool,
    pub rt_ge_c2: bool,
    pub st_ge_beta2: bool,
    pub rst_ge_cubic: bool,
    /// Full hermitian Kossakowski matrix, drift included, is PSD.
    pub drift_compatible: bool,
    pub a_nonneg: bool,
    pub alpha_nonneg: bool,
    pub gamma_nonneg: bool,
    pub a_alpha_ge_b2: bool,
    pub a_gamma_ge_c2: bool,
    pub alpha_gamma_ge_beta2: bool,
    pub det_nonneg: bool,
}

impl<T> CpLedger<T> {
    pub fn completely_positive(&self) -> bool {
        self.r_nonneg && self.s_nonneg && self.t_nonneg && self.rs_ge_b2 && self.rt_ge_c2 && self.st_ge_beta2 && self.rst_ge_cubic && self.drift_compatible
    }

    /// Necessary, not sufficient, for positivity of the semigroup.
    pub fn positivity_conditions(&self) -> bool {
        self.a_nonneg && self.alpha_nonneg && self.gamma_nonneg && self.a_alpha_ge_b2 && self.a_gamma_ge_c2 && self.alpha_gamma_ge_beta2 && self.det_nonneg
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let named = [
            ("2R >= 0", self.r_nonneg),
            ("2S >= 0", self.s_nonneg),
            ("2T >= 0", self.t_nonneg),
            ("RS >= b^2", self.rs_ge_b2),
            ("RT >= c^2", self.rt_ge_c2),
            ("ST >= beta^2", self.st_ge_beta2),
            ("RST >= 2 b c beta + R beta^2 + S c^2 + T b^2", self.rst_ge_cubic),
            ("Kossakowski with drift PSD", self.drift_compatible),
            ("a >= 0", self.a_nonneg),
            ("alpha >= 0", self.alpha_nonneg),
            ("gamma >= 0", self.gamma_nonneg),
            ("a alpha >= b^2", self.a_alpha_ge_b2),
            ("a gamma >= c^2", self.a_gamma_ge_c2),
            ("alpha gamma >= beta^2", self.alpha_gamma_ge_beta2),
            ("Det D3 >= 0", self.det_nonneg),
        ];
        named.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect()
    }
}

pub fn cp_ledger<T: Real>(d: &BlochAffine<T>) -> CpLedger<T> {
    let (a, b, c, al, be, ga) = (d.a(), d.b(), d.c(), d.alpha(), d.beta(), d.gamma());
    let half = real::<T>(0.5);
    let r = (al + ga - a) * half;
    let s = (a + ga - al) * half;
    let t = (a + al - ga) * half;
    let scale = d.dmat.amax().max(T::one());
    let e1 = -tol::<T>(1e-12) * scale;
    let e2 = e1 * scale;
    let e3 = e2 * scale;
    let kp = d.kossakowski_pauli();
    let kd = CMatrix::<T>::from_fn(3, 3, |i, j| kp[(i, j)]);
    let two = real::<T>(2.0);
    CpLedger {
        r,
        s,
        t,
        r_nonneg: r >= e1,
        s_nonneg: s >= e1,
        t_nonneg: t >= e1,
        rs_ge_b2: r * s - b * b >= e2,
        rt_ge_c2: r * t - c * c >= e2,
        st_ge_beta2: s * t - be * be >= e2,
        rst_ge_cubic: r * s * t - (two * b * c * be + r * be * be + s * c * c + t * b * b) >= e3,
        drift_compatible: linalg::min_eigenvalue(&kd) >= e1,
        a_nonneg: a >= e1,
        alpha_nonneg: al >= e1,
        gamma_nonneg: ga >= e1,
        a_alpha_ge_b2: a * al - b * b >= e2,
        a_gamma_ge_c2: a * ga - c * c >= e2,
        alpha_gamma_ge_beta2: al * ga - be * be >= e2,
        det_nonneg: d.d3().determinant() >= e3,
    }
}

/// Pure state whose determinant decreases under the flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness<T: Real> {
    pub bloch: Vector3<T>,
    /// dDet ρ/dt at t = 0, equal to ρ⃗·𝒟^(3)ρ⃗ + 𝒟₀·ρ⃗ on the sphere.
    pub ddet: T,
    /// Whether the closed-form candidate produced it.
    pub analytic: bool,
}

fn ddet_at<T: Real>(d3: &Matrix3<T>, d0: &Vector3<T>, r: &Vector3<T>) -> T {
    r.dot(&(d3 * r)) + d0.dot(r)
}

/// A pure state leaving the Bloch ball, if one exists.
///
/// First tries the closed-form candidate for 𝒟^(3) = [[0,b,0],[b,α,0],[0,0,α]],
/// 𝒟₀ = (0,0,w); then 64 projected-gradient restarts on the sphere.
pub fn positivity_witness<T: Real>(d: &BlochAffine<T>) -> Option<Witness<T>> {
    let d3 = d.d3();
    let d0 = d.drift();
    let threshold = real::<T>(-1e-12);
    let scale = d.dmat.amax().max(real(1e-300));
    let small = |x: T| x.abs() <= tol::<T>(1e-12) * scale;
    let (b, al, w) = (d.b(), d.alpha(), d0[2]);
    if small(d.a()) && small(d.c()) && small(d.beta()) && small(d.gamma() - al) && small(d0[0]) && small(d0[1]) && al > T::zero() {
        let four = real::<T>(4.0);
        let two = real::<T>(2.0);
        let disc = four * al * al - w * w;
        if disc >= T::zero() {
            let k = (disc / (al * al + b * b)).sqrt();
            let r = Vector3::new(k / two, -b * k / (two * al), -w / (two * al));
            let v = ddet_at(&d3, &d0, &r);
            if v < threshold {
                return Some(Witness { bloch: r, ddet: v, analytic: true });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let step = real::<T>(0.25) / (d3.norm() * real(2.0) + d0.norm() + real(1e-300));
    let mut best: Option<(T, Vector3<T>)> = None;
    for _ in 0..64 {
        let mut r = Vector3::<T>::from_fn(|_, _| real(rng.random_range(-1.0..1.0)));
        if r.norm() < real(1e-6) {
            r = Vector3::z();
        }
        r.normalize_mut();
        for _ in 0..4000 {
            let g = d3 * r * real::<T>(2.0) + d0;
            let tangent = g - r * g.dot(&r);
            if tangent.norm() < real(1e-15) {
                break;
            }
            r = (r - tangent * step).normalize();
        }
        let v = ddet_at(&d3, &d0, &r);
        if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
            best = Some((v, r));
        }
    }
    let (v, r) = best.unwrap();
    (v < threshold).then_some(Witness { bloch: r, ddet: v, analytic: false })
}

/// Bloch vector of a qubit operator, for trajectories.
pub fn bloch_of<T: Real>(x: &CMatrix<T>) -> Vector3<T> {
    bloch_components(x)
}

/// ½(1 + r⃗·σ⃗).
pub fn operator_of<T: Real>(r: &Vector3<T>) -> CMatrix<T> {
    bloch_operator(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::states::{bloch_to_density, make_density, BlochVector};

    type C = Complex<f64>;

    fn example_3_2(omega: f64, r: f64, p: f64, q: f64) -> BlochAffine<f64> {
        // the matrix-element equations correspond to −(ℋ+𝒟) with these
        // entries; halve them for the −2(ℋ+𝒟) convention
        let mut d = Matrix4::zeros();
        d[(1, 1)] = r / 2.0;
        d[(2, 2)] = r / 2.0;
        d[(3, 3)] = (p + q) / 2.0;
        d[(3, 0)] = (p - q) / 2.0;
        BlochAffine::new(Vector3::new(0.0, 0.0, omega / 2.0), d).unwrap()
    }

    fn random_generator(n: usize, seed: u64) -> LindbladGenerator<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random::hermitian::<f64, _>(n, &mut rng);
        let c = random::psd::<f64, _>(n * n - 1, 2, &mut rng) * C::new(0.3, 0.0);
        LindbladGenerator::with_gell_mann(h, c).unwrap()
    }

    #[test]
    fn depolarizing_action() {
        let g = LindbladGenerator::<f64>::depolarizing();
        let half = DensityMatrix::<f64>::maximally_mixed(2);
        assert!(apply_generator(&g, half.matrix()).unwrap().norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = DensityMatrix::pure(&random::ket::<f64, _>(2, &mut rng)).unwrap();
        let out = apply_generator(&g, psi.matrix()).unwrap();
        let expect = (psi.matrix() - half.matrix()) * C::new(-4.0, 0.0);
        assert!((out - expect).norm() < 1e-14);
        // Σσ_iρσ_i − 3ρ
        let s = linalg::pauli::<f64>();
        let direct = (1..4).fold(CMatrix::zeros(2, 2), |a, k| a + &s[k] * psi.matrix() * &s[k]) - psi.matrix() * C::new(3.0, 0.0);
        assert!((apply_generator(&g, psi.matrix()).unwrap() - direct).norm() < 1e-14);
    }

    #[test]
    fn hamiltonian_only_is_commutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random::hermitian::<f64, _>(3, &mut rng);
        let g = LindbladGenerator::with_gell_mann(h.clone(), CMatrix::zeros(8, 8)).unwrap();
        let x = random::density::<f64, _>(3, &mut rng);
        let expect = (&h * &x - &x * &h) * C::new(0.0, -1.0);
        assert!((apply_generator(&g, &x).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn superoperator_matches_direct_action() {
        for (n, seed) in [(2, 3), (3, 4), (4, 5)] {
            let g = random_generator(n, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            let x = random::ginibre::<f64, _>(n, n, &mut rng);
            let via = linalg::unvec(&(superoperator(&g) * linalg::vec(&x)), n);
            assert!((via - apply_generator(&g, &x).unwrap()).norm() < 1e-12);
            assert!(apply_generator(&g, &x).unwrap().trace().norm() < 1e-12);
        }
    }

    #[test]
    fn basis_validation() {
        let mut bad = linalg::gell_mann::<f64>(2);
        bad[0] = linalg::identity(2);
        assert!(matches!(LindbladGenerator::new(CMatrix::zeros(2, 2), CMatrix::zeros(3, 3), bad), Err(Error::InvalidBasis { .. })));
        assert!(LindbladGenerator::<f64>::new(CMatrix::zeros(2, 2), CMatrix::zeros(3, 3), linalg::gell_mann(2)).is_ok());
    }

    #[test]
    fn cp_verdicts() {
        assert!(is_cp_generator(&LindbladGenerator::<f64>::depolarizing()).completely_positive);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let c = random::psd::<f64, _>(3, 3, &mut rng);
            let g = LindbladGenerator::with_gell_mann(CMatrix::zeros(2, 2), c).unwrap();
            assert!(is_cp_generator(&g).completely_positive);
            let c = random::hermitian_with_negative::<f64, _>(3, &mut rng);
            let g = LindbladGenerator::with_gell_mann(CMatrix::zeros(2, 2), c).unwrap();
            assert!(!is_cp_generator(&g).completely_positive);
        }
        for &(r, p, cp) in &[(1.0, 0.5, true), (0.5, 0.5, true), (0.4, 0.5, false)] {
            let g = from_bloch_affine(&example_3_2(1.0, r, p, p));
            assert_eq!(is_cp_generator(&g).completely_positive, cp);
        }
    }

    #[test]
    fn evolution_closed_forms() {
        let g = LindbladGenerator::<f64>::depolarizing();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = DensityMatrix::pure(&random::ket::<f64, _>(2, &mut rng)).unwrap();
        for &t in &[0.0, 0.1, 0.7, 2.0] {
            let e = (-4.0f64 * t).exp();
            let expect = linalg::identity::<f64>(2) * C::new((1.0 - e) / 2.0, 0.0) + rho.matrix() * C::new(e, 0.0);
            assert!((evolve(&g, &rho, t).unwrap() - expect).norm() < 1e-13);
        }
        assert!((evolve(&g, &rho, 0.0).unwrap() - rho.matrix()).norm() < 1e-15);
        assert!(matches!(evolve(&g, &rho, -1.0), Err(Error::NegativeTime { .. })));

        let (omega, r, p, q) = (1.3, 0.4, 0.2, 0.1);
        let g = from_bloch_affine(&example_3_2(omega, r, p, q));
        let rho = make_density(random::density::<f64, _>(2, &mut rng)).unwrap();
        for &t in &[0.3, 1.1, 4.0] {
            let out = evolve(&g, &rho, t).unwrap();
            let expect = rho.matrix()[(0, 1)] * C::new(-r * t, -omega * t).exp();
            assert!((out[(0, 1)] - expect).norm() < 1e-12);
            // populations: ρ₁₁' = −pρ₁₁ + qρ₂₂ relaxes to q/(p+q)
            let eq = q / (p + q);
            let expect11 = eq + (rho.matrix()[(0, 0)].re - eq) * (-(p + q) * t).exp();
            assert!((out[(0, 0)].re - expect11).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_matches_spectral_method() {
        // H-only: i𝕃 is hermitian
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = random::hermitian::<f64, _>(3, &mut rng);
        let g = LindbladGenerator::with_gell_mann(h, CMatrix::zeros(8, 8)).unwrap();
        let l = superoperator(&g);
        let il = &l * C::new(0.0, 1.0);
        let (vals, vecs) = linalg::eigh(&il);
        let t = 0.9;
        let d = DMatrix::from_diagonal(&vals.map(|x| C::new(0.0, -x * t).exp()));
        let spectral = &vecs * d * vecs.adjoint();
        assert!((propagator(&g, t).unwrap() - spectral).norm() < 1e-12);
        // depolarizing: 𝕃 is hermitian
        let g = LindbladGenerator::<f64>::depolarizing();
        let (vals, vecs) = linalg::eigh(&superoperator(&g));
        let d = DMatrix::from_diagonal(&vals.map(|x| C::new(x * t, 0.0).exp()));
        assert!((propagator(&g, t).unwrap() - &vecs * d * vecs.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn exponential_matches_ode() {
        let g = random_generator(3, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let rho = make_density(random::density::<f64, _>(3, &mut rng)).unwrap();
        let a = evolve(&g, &rho, 1.5).unwrap();
        let b = evolve_ode(&g, &rho, 1.5, &OdeOptions::default()).unwrap();
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn bloch_affine_entries() {
        let c = Matrix3::from_diagonal(&Vector3::new(C::new(0.3, 0.0), C::new(0.5, 0.0), C::new(0.7, 0.0)));
        let d = to_bloch_affine(&LindbladGenerator::qubit(Vector3::new(0.0, 0.0, 0.8), c)).unwrap();
        assert!((d.a() - 1.2).abs() < 1e-14 && (d.alpha() - 1.0).abs() < 1e-14 && (d.gamma() - 0.8).abs() < 1e-14);
        assert!(d.b().abs() < 1e-14 && d.drift().norm() < 1e-14);
        let hm = d.hamiltonian_matrix();
        assert!((hm[(1, 2)] - 0.8).abs() < 1e-14 && (hm[(2, 1)] + 0.8).abs() < 1e-14);
        assert!(to_bloch_affine(&random_generator(3, 1)).is_err());
    }

    #[test]
    fn bloch_affine_round_trip_and_flow() {
        for seed in 0..10 {
            let g = random_generator(2, 20 + seed);
            let d = to_bloch_affine(&g).unwrap();
            let back = from_bloch_affine(&d);
            assert!((superoperator(&back) - superoperator(&g)).norm() < 1e-12);
            let d2 = to_bloch_affine(&back).unwrap();
            assert!((d2.dissipator_matrix() - d.dissipator_matrix()).norm() < 1e-12);
            assert!((d2.omega() - d.omega()).norm() < 1e-12);

            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = make_density(random::density::<f64, _>(2, &mut rng)).unwrap();
            let b = crate::states::density_to_bloch(&rho).unwrap();
            for &t in &[0.2, 1.0, 3.0] {
                let v = d.flow(&b.coherence(), t);
                let m = evolve(&g, &rho, t).unwrap();
                let r = bloch_of(&m);
                assert!((Vector3::new(v[1], v[2], v[3]) - r).norm() < 1e-8);
                assert!((v[0] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ledger_examples() {
        let l = cp_ledger(&BlochAffine::from_params(Vector3::zeros(), 1.0, 0.0, 0.0, 1.0, 0.0, 1.0, Vector3::zeros()));
        assert_eq!((l.r, l.s, l.t), (0.5, 0.5, 0.5));
        assert!(l.completely_positive() && l.positivity_conditions());

        let l = cp_ledger(&example_3_2(1.0, 0.3, 0.5, 0.5));
        assert!((l.t - (0.3 - 0.5) / 2.0).abs() < 1e-15);
        assert!(!l.completely_positive() && l.positivity_conditions());
        assert_eq!(l.failures(), vec!["2T >= 0", "RT >= c^2", "ST >= beta^2", "RST >= 2 b c beta + R beta^2 + S c^2 + T b^2", "Kossakowski with drift PSD"]);

        // Redfield-like 𝒟 with b ≠ 0: verdict agrees with the eigenvalue test
        let d = BlochAffine::from_params(Vector3::zeros(), 0.0, 0.1, 0.0, 1.0, 0.0, 1.0, Vector3::new(0.0, 0.0, 0.3));
        let l = cp_ledger(&d);
        let cp = is_cp_generator(&from_bloch_affine(&d)).completely_positive;
        assert_eq!(l.completely_positive(), cp);
        assert!(!cp);
        assert!(!l.a_alpha_ge_b2);
    }

    #[test]
    fn stationary_examples() {
        let st = stationary_states(&LindbladGenerator::<f64>::depolarizing());
        assert_eq!(st.basis.len(), 1);
        assert!((&st.state - linalg::identity::<f64>(2) * C::new(0.5, 0.0)).norm() < 1e-12);

        let h = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(2.5, 0.0)]));
        let g = LindbladGenerator::with_gell_mann(h.clone(), CMatrix::zeros(8, 8)).unwrap();
        let st = stationary_states(&g);
        assert_eq!(st.basis.len(), 3);
        for b in &st.basis {
            assert!((&h * b - b * &h).norm() < 1e-9);
            assert!(apply_generator(&g, b).unwrap().norm() < 1e-9);
        }
        assert!((&st.state - linalg::identity::<f64>(3) / C::new(3.0, 0.0)).norm() < 1e-9);

        let g = from_bloch_affine(&example_3_2(1.0, 0.4, 0.3, 0.1));
        let st = stationary_states(&g);
        assert_eq!(st.basis.len(), 1);
        assert!((st.state[(0, 0)].re - 0.25).abs() < 1e-10);
    }

    #[test]
    fn witness_examples() {
        let (alpha, b, w) = (1.0f64, 0.3, 0.4);
        let d = BlochAffine::from_params(Vector3::new(0.0, 0.0, 0.5), 0.0, b, 0.0, alpha, 0.0, alpha, Vector3::new(0.0, 0.0, w));
        let wit = positivity_witness(&d).unwrap();
        assert!(wit.analytic);
        let expect = -alpha * (4.0 * b * b + w * w) / (4.0 * (alpha * alpha + b * b));
        assert!((wit.ddet - expect).abs() < 1e-14);
        assert!((wit.bloch.norm() - 1.0).abs() < 1e-14);

        // ddet is the true derivative of Det ρ(t) along the flow
        let g = from_bloch_affine(&d);
        let rho = bloch_to_density(&BlochVector::new(wit.bloch / (1.0 + 1e-15)).unwrap());
        let h = 1e-5;
        let det = |t: f64| evolve(&g, &rho, t).unwrap().determinant().re;
        let fd = (det(h) - det(0.0)) / h;
        assert!((fd - wit.ddet).abs() < 1e-4);

        let cp = BlochAffine::from_params(Vector3::zeros(), 1.0, 0.1, 0.0, 1.0, 0.0, 1.0, Vector3::zeros());
        assert!(positivity_witness(&cp).is_none());

        let none = BlochAffine::from_params(Vector3::zeros(), 0.0, 0.0, 0.0, alpha, 0.0, alpha, Vector3::zeros());
        assert!(positivity_witness(&none).is_none());

        // generic numeric search path
        let odd = BlochAffine::from_params(Vector3::zeros(), 0.2, 0.5, 0.1, 0.3, 0.0, 1.0, Vector3::new(0.05, 0.0, 0.0));
        let wit = positivity_witness(&odd).unwrap();
        assert!(!wit.analytic && wit.ddet < 0.0);
    }

    #[test]
    fn single_precision_generator() {
        let g = LindbladGenerator::<f32>::depolarizing();
        let rho = DensityMatrix::<f32>::maximally_mixed(2);
        let out = evolve(&g, &rho, 0.5f32).unwrap();
        assert!((out[(0, 0)].re - 0.5).abs() < 1e-6);
        assert!(is_cp_generator(&g).completely_positive);
    }
}
