//! Markovian generators for a qubit coupled to a bath, from the bath
//! correlation function.
//!
//! Half-line integrals use the convention ∫₀^∞ δ(t) f(t) dt = f(0)/2, so white
//! noise g·δ(t) has F(ζ) = g/2 and spectral density h = g.

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lindblad::{BlochAffine, LindbladGenerator};
use crate::quad::{self, Estimate, QuadOptions};
use crate::special::{ln_abs_gamma, trigamma};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BathKind {
    ThermalScalarDerivative,
    OhmicCutoff,
    WhiteNoise,
    ExponentialSingleAxis,
    CustomTabulated,
}

/// Scalar stationary correlation G(t) = ⟨B(t)B(0)⟩ with G(−t) = G(t)*.
///
/// Coupling constants are folded into G, so h(ζ) = ∫ e^{iζt} G(t) dt is the
/// full rate function.
#[derive(Clone, Debug, PartialEq)]
pub struct BathCorrelation {
    kind: BathKind,
    beta: f64,
    coupling: f64,
    cutoff: f64,
    decay: f64,
    strength: f64,
    times: Vec<f64>,
    values: Vec<Complex64>,
    eta: f64,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!("{name} must be positive, got {x}")))
    }
}

impl BathCorrelation {
    fn base(kind: BathKind) -> Self {
        Self {
            kind,
            beta: f64::INFINITY,
            coupling: 0.0,
            cutoff: 0.0,
            decay: 0.0,
            strength: 0.0,
            times: Vec::new(),
            values: Vec::new(),
            eta: 0.0,
        }
    }

    /// λ²⟨∂ₜφ(t)∂ₜφ(0)⟩_β for a massless field in 1+1 dimensions, cut off at ε:
    /// h(ζ) = λ² ζ e^{−ε|ζ|} / (1 − e^{−βζ}). β = ∞ is the vacuum.
    pub fn thermal_scalar_derivative(beta: f64, coupling: f64, cutoff: f64) -> Result<Self> {
        positive("beta", beta)?;
        positive("cutoff", cutoff)?;
        Ok(Self { beta, coupling, cutoff, ..Self::base(BathKind::ThermalScalarDerivative) })
    }

    /// Same profile divided by 2π: h(ζ) = λ² ζ e^{−ε|ζ|} / (2π(1 − e^{−βζ})).
    pub fn ohmic_cutoff(beta: f64, coupling: f64, cutoff: f64) -> Result<Self> {
        positive("beta", beta)?;
        positive("cutoff", cutoff)?;
        Ok(Self { beta, coupling, cutoff, ..Self::base(BathKind::OhmicCutoff) })
    }

    /// G(t) = g δ(t).
    pub fn white_noise(g: f64) -> Result<Self> {
        if g < 0.0 || g.is_nan() {
            return Err(Error::CovarianceNotPsd { min_eigenvalue: g });
        }
        Ok(Self { strength: g, ..Self::base(BathKind::WhiteNoise) })
    }

    /// G(t) = B² e^{−λ|t|}.
    pub fn exponential_single_axis(b_squared: f64, decay: f64) -> Result<Self> {
        positive("decay", decay)?;
        if b_squared < 0.0 {
            return Err(Error::CovarianceNotPsd { min_eigenvalue: b_squared });
        }
        Ok(Self { strength: b_squared, decay, ..Self::base(BathKind::ExponentialSingleAxis) })
    }

    /// Samples of G on increasing t ≥ 0 starting at 0, linearly interpolated
    /// and zero past the last sample. `eta` is the caller's decay exponent in
    /// |G(t)|(1+t)^η < const.
    pub fn tabulated(times: Vec<f64>, values: Vec<Complex64>, eta: f64) -> Result<Self> {
        if eta <= 0.0 || eta.is_nan() {
            return Err(Error::OutOfDomain(format!("decay exponent must be positive, got {eta}")));
        }
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), got: values.len() });
        }
        if times.len() < 2 || times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::OutOfDomain("sample times must increase from 0".into()));
        }
        if values[0].im.abs() > 1e-12 * values[0].norm().max(1.0) {
            return Err(Error::NotHermitian { defect: values[0].im.abs() });
        }
        Ok(Self { times, values, eta, ..Self::base(BathKind::CustomTabulated) })
    }

    pub fn kind(&self) -> BathKind {
        self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// G(t); zero away from t = 0 for white noise.
    pub fn eval(&self, t: f64) -> Complex64 {
        if t < 0.0 {
            return self.eval(-t).conj();
        }
        match self.kind {
            BathKind::ThermalScalarDerivative => self.thermal(t),
            BathKind::OhmicCutoff => self.thermal(t) / (2.0 * PI),
            BathKind::WhiteNoise => Complex64::new(0.0, 0.0),
            BathKind::ExponentialSingleAxis => Complex64::new(self.strength * (-self.decay * t).exp(), 0.0),
            BathKind::CustomTabulated => self.interpolate(t),
        }
    }

    fn thermal(&self, t: f64) -> Complex64 {
        let l2 = self.coupling * self.coupling;
        let z = Complex64::new(self.cutoff, t);
        let mut g = 1.0 / (z * z);
        if self.beta.is_finite() {
            let b = self.beta;
            g += (trigamma(1.0 + z / b) + trigamma(1.0 + z.conj() / b)) / (b * b);
        }
        g * (l2 / (2.0 * PI))
    }

    fn interpolate(&self, t: f64) -> Complex64 {
        let last = *self.times.last().unwrap();
        if t >= last {
            return Complex64::new(0.0, 0.0);
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let w = (t - t0) / (t1 - t0);
        self.values[k] * (1.0 - w) + self.values[k + 1] * w
    }

    /// Closed-form h(ζ) where one exists.
    pub fn spectral_density(&self, zeta: f64) -> Option<f64> {
        let l2 = self.coupling * self.coupling;
        let thermal = || {
            let damp = (-self.cutoff * zeta.abs()).exp();
            if zeta == 0.0 {
                if self.beta.is_finite() { l2 / self.beta } else { 0.0 }
            } else if self.beta.is_finite() {
                l2 * zeta * damp / (-(-self.beta * zeta).exp_m1())
            } else if zeta > 0.0 {
                l2 * zeta * damp
            } else {
                0.0
            }
        };
        match self.kind {
            BathKind::ThermalScalarDerivative => Some(thermal()),
            BathKind::OhmicCutoff => Some(thermal() / (2.0 * PI)),
            BathKind::WhiteNoise => Some(self.strength),
            BathKind::ExponentialSingleAxis => {
                Some(2.0 * self.strength * self.decay / (self.decay * self.decay + zeta * zeta))
            }
            BathKind::CustomTabulated => None,
        }
    }

    /// Time scale past which G has decayed, used to place the truncation point.
    fn timescale(&self) -> f64 {
        match self.kind {
            BathKind::ThermalScalarDerivative | BathKind::OhmicCutoff => {
                self.cutoff + self.beta.min(100.0 * self.cutoff)
            }
            BathKind::WhiteNoise => 0.0,
            BathKind::ExponentialSingleAxis => 1.0 / self.decay,
            BathKind::CustomTabulated => *self.times.last().unwrap() / 10.0,
        }
    }
}

/// ∫₀^∞ e^{iζt} G(t) dt = h(ζ)/2 + i s(ζ), with its error estimate.
pub fn halfline_fourier(g: &BathCorrelation, zeta: f64) -> Result<Estimate> {
    if g.kind == BathKind::WhiteNoise {
        return Ok(Estimate { value: Complex64::new(g.strength / 2.0, 0.0), abs_error: 0.0 });
    }
    let scale = g.timescale();
    let size = g.eval(0.0).norm() * scale;
    let opts = QuadOptions { abs_tol: 1e-13 * size.max(f64::MIN_POSITIVE), rel_tol: 1e-11, ..QuadOptions::default() };
    let f = |t: f64| g.eval(t);
    quad::halfline(&f, zeta, scale, &opts)
}

/// α, b, d of the σ₁-coupled qubit with H_S = (Ω/2)σ₃.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RedfieldCoefficients {
    pub alpha: f64,
    pub b: f64,
    pub d: f64,
    pub abs_error: f64,
}

/// α = Re[F(Ω)+F(−Ω)], b = Im[F(Ω)−F(−Ω)], d = Re[F(Ω)−F(−Ω)], F the half-line transform.
pub fn redfield_coefficients(omega: f64, g: &BathCorrelation) -> Result<RedfieldCoefficients> {
    let p = halfline_fourier(g, omega)?;
    let m = if omega == 0.0 { p } else { halfline_fourier(g, -omega)? };
    let sum = p.value + m.value;
    let diff = p.value - m.value;
    Ok(RedfieldCoefficients { alpha: sum.re, b: diff.im, d: diff.re, abs_error: p.abs_error + m.abs_error })
}

fn system_omega(omega: f64) -> Vector3<f64> {
    Vector3::new(0.0, 0.0, omega / 2.0)
}

fn redfield_matrix(k: &RedfieldCoefficients) -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, k.b, 0.0,
        0.0, 0.0, k.alpha, 0.0,
        k.d, 0.0, 0.0, k.alpha,
    )
}

/// Second-order (Redfield) generator; not CP once b or d is nonzero.
pub fn redfield_generator(omega: f64, g: &BathCorrelation) -> Result<BlochAffine<f64>> {
    let k = redfield_coefficients(omega, g)?;
    BlochAffine::new(system_omega(omega), redfield_matrix(&k))
}

/// lim (1/2T)∫ 𝒰ₛ 𝒟 𝒰₋ₛ ds under the free rotation at frequency Ω,
/// by the trapezoid rule over one period.
pub fn ergodic_average(d: &Matrix4<f64>, omega: f64, samples: usize) -> Matrix4<f64> {
    if omega == 0.0 {
        return *d;
    }
    let h = *BlochAffine::from_params(system_omega(omega), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, Vector3::zeros())
        .hamiltonian_matrix();
    let period = 2.0 * PI / omega.abs();
    let n = samples.max(1);
    let mut acc = Matrix4::zeros();
    for k in 0..n {
        let s = period * k as f64 / n as f64;
        let u = (h * (-2.0 * s)).exp();
        let v = (h * (2.0 * s)).exp();
        acc += u * d * v;
    }
    acc / n as f64
}

/// Weak-coupling limit: the ergodic average of the Redfield dissipator,
/// 𝒟₂ with diagonal (α/2, α/2, α) and d in column 0. The antisymmetric b/2
/// survives the average and shifts the level splitting.
pub fn weak_coupling_generator(omega: f64, g: &BathCorrelation) -> Result<BlochAffine<f64>> {
    let k = redfield_coefficients(omega, g)?;
    let (a, b, d) = (k.alpha, k.b, k.d);
    let m = if omega == 0.0 {
        redfield_matrix(&k)
    } else {
        Matrix4::new(
            0.0, 0.0, 0.0, 0.0,
            0.0, a / 2.0, b / 2.0, 0.0,
            0.0, -b / 2.0, a / 2.0, 0.0,
            d, 0.0, 0.0, a,
        )
    };
    BlochAffine::new(system_omega(omega), m)
}

/// Singular-coupling limit: α = 2 Re ∫₀^∞ G, 𝒟 = diag(0, 0, α, α).
pub fn singular_coupling_generator(omega: f64, g: &BathCorrelation) -> Result<BlochAffine<f64>> {
    let alpha = 2.0 * halfline_fourier(g, 0.0)?.value.re;
    let m = Matrix4::from_diagonal(&nalgebra::Vector4::new(0.0, 0.0, alpha, alpha));
    BlochAffine::new(system_omega(omega), m)
}

/// Time-convolutionless generator: Redfield's coefficients with b moved to
/// the transposed slot, which after the split is Redfield with b → −b.
pub fn convolutionless_generator(omega: f64, g: &BathCorrelation) -> Result<BlochAffine<f64>> {
    let k = redfield_coefficients(omega, g)?;
    let m = Matrix4::new(
        0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
        0.0, -k.b, k.alpha, 0.0,
        k.d, 0.0, 0.0, k.alpha,
    );
    BlochAffine::new(system_omega(omega), m)
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// ψ^(ξ)_ij for ξ = −1, 0, +1 and unit n.
fn psi(xi: i8, n: &Vector3<f64>) -> Matrix3<Complex64> {
    Matrix3::from_fn(|i, j| {
        let nn = n[i] * n[j];
        if xi == 0 {
            return Complex64::new(nn, 0.0);
        }
        let delta = if i == j { 1.0 } else { 0.0 };
        let eps: f64 = (0..3).map(|k| levi_civita(i, j, k) * n[k]).sum();
        Complex64::new(0.5 * (delta - nn), 0.5 * xi as f64 * eps)
    })
}

/// Weak-coupling (Davies) generator for H = (Ω/2) n·σ coupled through
/// Σ σᵢ ⊗ Φᵢ, given the 3×3 spectral matrix h_kl(ζ) of the bath.
///
/// C_ij = Σ_ξ Σ_kl h_kl(ξΩ) ψ^(ξ)_ki ψ^(−ξ)_lj; the Lamb shift is not included.
pub fn davies_generator<F>(omega: f64, n: Vector3<f64>, h: F) -> Result<LindbladGenerator<f64>>
where
    F: Fn(f64) -> Matrix3<Complex64>,
{
    let norm = n.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::OutOfDomain(format!("direction must be a unit vector, |n| = {norm}")));
    }
    let mut c = Matrix3::<Complex64>::zeros();
    for xi in [-1i8, 0, 1] {
        let hk = h(xi as f64 * omega);
        let (p, q) = (psi(xi, &n), psi(-xi, &n));
        c += p.transpose() * hk * q;
    }
    Ok(LindbladGenerator::qubit(n * (omega / 2.0), c))
}

/// Exactly solvable spin–boson dephasing model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinBosonDephasing {
    pub lambda: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub omega: f64,
}

impl SpinBosonDephasing {
    pub fn new(lambda: f64, epsilon: f64, beta: f64, omega: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        positive("epsilon", epsilon)?;
        positive("beta", beta)?;
        Ok(Self { lambda, epsilon, beta, omega })
    }
}

/// Γ(t) = (λ²/π) ln(1+(t/ε)²) − (4λ²/π) ln[|Γ(1+ε/β+it/β)| / Γ(1+ε/β)].
///
/// Even in t.
pub fn dephasing_gamma(t: f64, m: &SpinBosonDephasing) -> f64 {
    let l2 = m.lambda * m.lambda;
    let x = t / m.epsilon;
    let vacuum = l2 / PI * (x * x).ln_1p();
    if !m.beta.is_finite() {
        return vacuum;
    }
    let a = 1.0 + m.epsilon / m.beta;
    let thermal = ln_abs_gamma(Complex64::new(a, t / m.beta)) - ln_abs_gamma(Complex64::new(a, 0.0));
    vacuum - 4.0 * l2 / PI * thermal
}

/// Interaction-picture state: populations fixed, coherences damped by e^{−Γ(t)}.
pub fn dephasing_state(t: f64, m: &SpinBosonDephasing, rho0: &crate::CMatrix<f64>) -> Result<crate::CMatrix<f64>> {
    if rho0.nrows() != 2 || rho0.ncols() != 2 {
        return Err(Error::NotQubit { dim: rho0.nrows() });
    }
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    let f = (-dephasing_gamma(t, m)).exp();
    let mut r = rho0.clone();
    r[(0, 1)] *= f;
    r[(1, 0)] *= f;
    Ok(r)
}

/// Covariance of the classical field B(t) in ∂ₜR = −i[(Ω/2)σ₃ + B(t)·σ, R].
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseCovariance {
    /// G_ij δ(t − s) with G real symmetric PSD.
    WhiteNoise(Matrix3<f64>),
    /// B(t) = (B(t), 0, 0) with ⟨B(t)B(s)⟩ = B² e^{−λ|t−s|}.
    ExponentialSingleAxis { b_squared: f64, decay: f64 },
}

/// Noise-averaged generator: −i[(Ω/2)σ₃ + H⁽²⁾, ρ] + Σ C_ij(σⱼρσᵢ − ½{σᵢσⱼ, ρ}).
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticGenerator {
    pub omega: f64,
    /// Antisymmetric κ_ij; enters only H⁽²⁾.
    pub kappa: Matrix3<f64>,
    /// H⁽²⁾ = h·σ with h_k = Σ ε_ijk κ_ij.
    pub h2: Vector3<f64>,
    pub c: Matrix3<f64>,
    pub abs_error: f64,
}

impl StochasticGenerator {
    pub fn lindblad(&self) -> LindbladGenerator<f64> {
        let c = self.c.map(|x| Complex64::new(x, 0.0));
        LindbladGenerator::qubit(system_omega(self.omega) + self.h2, c)
    }

    pub fn bloch(&self) -> Result<BlochAffine<f64>> {
        crate::lindblad::to_bloch_affine(&self.lindblad())
    }
}

/// C = M + Mᵀ and κ = (M − Mᵀ)/2 with M = ∫₀^∞ G(s) U(−s) ds.
pub fn stochastic_field_generator(omega: f64, cov: &NoiseCovariance) -> Result<StochasticGenerator> {
    let (m, abs_error) = match cov {
        NoiseCovariance::WhiteNoise(g) => {
            if (g - g.transpose()).amax() > 1e-12 * g.amax().max(1.0) {
                return Err(Error::NotHermitian { defect: (g - g.transpose()).amax() });
            }
            let min = g.symmetric_eigenvalues().min();
            if min < -1e-12 * g.amax().max(1.0) {
                return Err(Error::CovarianceNotPsd { min_eigenvalue: min });
            }
            (g / 2.0, 0.0)
        }
        NoiseCovariance::ExponentialSingleAxis { b_squared, decay } => {
            let bath = BathCorrelation::exponential_single_axis(*b_squared, *decay)?;
            let f = halfline_fourier(&bath, omega)?;
            // G(s)U(−s) has only row 0: g(s)(cos Ωs, sin Ωs, 0)
            let mut m = Matrix3::zeros();
            m[(0, 0)] = f.value.re;
            m[(0, 1)] = f.value.im;
            (m, f.abs_error)
        }
    };
    let c = m + m.transpose();
    let kappa = (m - m.transpose()) / 2.0;
    let h2 = Vector3::from_fn(|k, _| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += levi_civita(i, j, k) * kappa[(i, j)];
            }
        }
        s
    });
    Ok(StochasticGenerator { omega, kappa, h2, c, abs_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{cp_ledger, positivity_witness};

    fn thermal() -> BathCorrelation {
        BathCorrelation::thermal_scalar_derivative(1.0, 0.3, 0.1).unwrap()
    }

    #[test]
    fn white_noise_delta_convention() {
        let g = BathCorrelation::white_noise(0.7).unwrap();
        assert_eq!(halfline_fourier(&g, 1.3).unwrap().value, Complex64::new(0.35, 0.0));
        let s = singular_coupling_generator(1.0, &g).unwrap();
        assert!((s.alpha() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn exponential_closed_form() {
        let (b2, l, w) = (0.8, 0.6, 1.7);
        let g = BathCorrelation::exponential_single_axis(b2, l).unwrap();
        let f = halfline_fourier(&g, w).unwrap();
        let exact = Complex64::new(l, w) * (b2 / (l * l + w * w));
        assert!((f.value - exact).norm() < 1e-10, "{:?}", f);
    }

    #[test]
    fn thermal_transform_matches_spectral_density() {
        for kind in [0, 1] {
            let g = if kind == 0 { thermal() } else { BathCorrelation::ohmic_cutoff(2.0, 1.0, 0.05).unwrap() };
            for &z in &[-3.0, -1.0, 0.0, 0.5, 2.0] {
                let f = halfline_fourier(&g, z).unwrap();
                let h = g.spectral_density(z).unwrap();
                assert!((2.0 * f.value.re - h).abs() < 1e-8 * h.abs().max(1e-3), "ζ={z}: {} vs {h}", 2.0 * f.value.re);
            }
        }
    }

    #[test]
    fn redfield_kms_and_witness() {
        let g = thermal();
        let (omega, beta) = (1.0, 1.0);
        let k = redfield_coefficients(omega, &g).unwrap();
        assert!(k.alpha > 0.0 && k.d > 0.0 && k.b.abs() > 1e-6);
        let kms = (k.alpha - k.d) - (-beta * omega).exp() * (k.alpha + k.d);
        assert!(kms.abs() < 1e-8, "{kms}");
        let r = redfield_generator(omega, &g).unwrap();
        assert!(!cp_ledger(&r).completely_positive());
        let w = positivity_witness(&r).expect("witness");
        assert!(w.ddet < 0.0);
    }

    #[test]
    fn redfield_at_zero_splitting_is_cp() {
        let r = redfield_generator(0.0, &thermal()).unwrap();
        assert_eq!(r.b(), 0.0);
        assert_eq!(r.drift()[2], 0.0);
        assert!(cp_ledger(&r).completely_positive());
    }

    #[test]
    fn weak_coupling_is_ergodic_average() {
        let g = thermal();
        let omega = 1.3;
        let k = redfield_coefficients(omega, &g).unwrap();
        let avg = ergodic_average(&redfield_matrix(&k), omega, 16);
        let numeric = BlochAffine::new(system_omega(omega), avg).unwrap();
        let analytic = weak_coupling_generator(omega, &g).unwrap();
        assert!((numeric.dissipator_matrix() - analytic.dissipator_matrix()).amax() < 1e-10);
        assert!((numeric.hamiltonian_matrix() - analytic.hamiltonian_matrix()).amax() < 1e-10);
        assert!((analytic.a() - k.alpha / 2.0).abs() < 1e-15);
        assert!((analytic.gamma() - k.alpha).abs() < 1e-15);
        assert!(cp_ledger(&analytic).completely_positive());
        // Gibbs state of (Ω/2)σ₃
        let r = analytic.stationary_bloch().unwrap();
        assert!((r[2] + (g.beta() * omega / 2.0).tanh()).abs() < 1e-8, "{r}");
        assert!(r[0].abs() < 1e-12 && r[1].abs() < 1e-12);
    }

    #[test]
    fn singular_coupling_is_unital_and_cp() {
        let s = singular_coupling_generator(1.0, &thermal()).unwrap();
        assert!(cp_ledger(&s).completely_positive());
        assert_eq!(s.b(), 0.0);
        assert!(s.stationary_bloch().is_none() || s.stationary_bloch().unwrap().norm() < 1e-12);
        let st = crate::lindblad::stationary_states(&crate::lindblad::from_bloch_affine(&s));
        let id = crate::linalg::identity::<f64>(2) * Complex64::new(0.5, 0.0);
        assert!((st.state - id).camax() < 1e-10);
    }

    #[test]
    fn convolutionless_flips_b() {
        let g = thermal();
        let r = redfield_generator(1.0, &g).unwrap();
        let c = convolutionless_generator(1.0, &g).unwrap();
        assert!((c.b() + r.b()).abs() < 1e-15);
        assert!((c.alpha() - r.alpha()).abs() < 1e-15 && (c.drift() - r.drift()).norm() < 1e-15);
        assert!(positivity_witness(&c).is_some());
        let w = BathCorrelation::white_noise(0.4).unwrap();
        let c0 = convolutionless_generator(1.0, &w).unwrap();
        let s0 = singular_coupling_generator(1.0, &w).unwrap();
        assert!((c0.dissipator_matrix() - s0.dissipator_matrix()).amax() < 1e-15);
    }

    #[test]
    fn davies_matches_weak_coupling() {
        let g = thermal();
        let omega = 1.0;
        let h = |z: f64| {
            let mut m = Matrix3::zeros();
            m[(0, 0)] = Complex64::new(g.spectral_density(z).unwrap(), 0.0);
            m
        };
        let dav = davies_generator(omega, Vector3::z(), h).unwrap();
        let wc = weak_coupling_generator(omega, &g).unwrap();
        assert!((dav.kossakowski() - crate::lindblad::from_bloch_affine(&wc).kossakowski()).camax() < 1e-8);
    }

    #[test]
    fn davies_dephasing_rate() {
        // σ₃ coupling to the thermal derivative field: only C₃₃ = λ²/β survives
        let (beta, lam) = (2.0, 0.4);
        let g = BathCorrelation::thermal_scalar_derivative(beta, lam, 0.1).unwrap();
        let h = |z: f64| {
            let mut m = Matrix3::zeros();
            m[(2, 2)] = Complex64::new(g.spectral_density(z).unwrap(), 0.0);
            m
        };
        let dav = davies_generator(1.0, Vector3::z(), h).unwrap();
        // kossakowski() is in the σ/√2 basis: twice the σ-convention entry
        let c = dav.kossakowski();
        let mut expect = Matrix3::<Complex64>::zeros();
        expect[(2, 2)] = Complex64::new(2.0 * lam * lam / beta, 0.0);
        let c3 = Matrix3::from_fn(|i, j| c[(i, j)]);
        assert!((c3 - expect).camax() < 1e-14, "{c}");
        // long-time slope of the exact solution
        let m = SpinBosonDephasing::new(lam, 0.1, beta, 1.0).unwrap();
        let slope = (dephasing_gamma(200.0, &m) - dephasing_gamma(100.0, &m)) / 100.0;
        assert!((slope - c3[(2, 2)].re).abs() < 0.01 * slope);
    }

    fn dephasing_oracle(t: f64, m: &SpinBosonDephasing) -> f64 {
        let f = |w: f64| {
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let x = (1.0 - (w * t).cos()) / w / (m.beta * w / 2.0).tanh() * (-m.epsilon * w).exp();
            Complex64::new(x, 0.0)
        };
        let top = 80.0 / m.epsilon;
        let width = (PI / t).min(top / 8.0);
        let n = (top / width).ceil() as usize;
        let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, ..QuadOptions::default() };
        let mut s = 0.0;
        for k in 0..n {
            s += quad::integrate(&f, k as f64 * width, (k + 1) as f64 * width, &opts).unwrap().value.re;
        }
        2.0 * m.lambda * m.lambda / PI * s
    }

    #[test]
    fn dephasing_matches_integral() {
        for &lam in &[0.3, 1.0] {
            for &eps in &[0.05, 0.2] {
                for &beta in &[1.0, 5.0] {
                    let m = SpinBosonDephasing::new(lam, eps, beta, 1.0).unwrap();
                    assert_eq!(dephasing_gamma(0.0, &m), 0.0);
                    for &t in &[0.01, 0.5, 3.0, 20.0] {
                        let a = (-dephasing_gamma(t, &m)).exp();
                        let b = (-dephasing_oracle(t, &m)).exp();
                        assert!((a - b).abs() <= 1e-6 * b, "λ={lam} ε={eps} β={beta} t={t}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn dephasing_regimes() {
        let l2 = 0.25f64;
        let m = SpinBosonDephasing::new(0.5, 0.01, 10.0, 1.0).unwrap();
        let t = 1e-4;
        let short = l2 / PI * (t / m.epsilon).powi(2);
        assert!((dephasing_gamma(t, &m) - short).abs() < 1e-3 * short);
        let m = SpinBosonDephasing::new(0.5, 1e-3, 1e3, 1.0).unwrap();
        let mid = 2.0 * l2 / PI * (1.0 / m.epsilon).ln();
        assert!((dephasing_gamma(1.0, &m) - mid).abs() < 1e-3 * mid);
        let m = SpinBosonDephasing::new(0.5, 0.1, 1.0, 1.0).unwrap();
        let slope = (dephasing_gamma(100.0, &m) - dephasing_gamma(50.0, &m)) / 50.0;
        assert!((slope - 2.0 * l2 / m.beta).abs() < 0.01 * 2.0 * l2 / m.beta);
        let mut prev = 0.0;
        for k in 1..200 {
            let g = dephasing_gamma(k as f64 * 0.1, &m);
            assert!(g >= prev);
            prev = g;
        }
    }

    #[test]
    fn stochastic_white_noise() {
        let g = Matrix3::new(1.0, 0.2, 0.0, 0.2, 0.5, 0.1, 0.0, 0.1, 0.3);
        let s = stochastic_field_generator(1.0, &NoiseCovariance::WhiteNoise(g)).unwrap();
        assert!((s.c - g).amax() < 1e-15);
        assert_eq!(s.h2, Vector3::zeros());
        assert!(cp_ledger(&s.bloch().unwrap()).completely_positive());
        let bad = Matrix3::new(1.0, 2.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            stochastic_field_generator(1.0, &NoiseCovariance::WhiteNoise(bad)),
            Err(Error::CovarianceNotPsd { .. })
        ));
    }

    #[test]
    fn stochastic_single_axis() {
        let (b2, l, w) = (0.9, 0.4, 1.1);
        let s = stochastic_field_generator(w, &NoiseCovariance::ExponentialSingleAxis { b_squared: b2, decay: l }).unwrap();
        let k = b2 / (l * l + w * w);
        let expect = Matrix3::new(2.0 * l, w, 0.0, w, 0.0, 0.0, 0.0, 0.0, 0.0) * k;
        assert!((s.c - expect).amax() < 1e-10);
        assert!((s.kappa[(0, 1)] - w * k / 2.0).abs() < 1e-10);
        let d = s.bloch().unwrap();
        let (alpha, b) = (2.0 * b2 * l / (l * l + w * w), b2 * w / (l * l + w * w));
        let d3 = Matrix3::new(0.0, -b, 0.0, -b, alpha, 0.0, 0.0, 0.0, alpha);
        assert!((d.d3() - d3).amax() < 1e-10, "{}", d.d3());
        assert!(!cp_ledger(&d).completely_positive());
        assert!(positivity_witness(&d).is_some());
        let s0 = stochastic_field_generator(0.0, &NoiseCovariance::ExponentialSingleAxis { b_squared: b2, decay: l }).unwrap();
        assert!(cp_ledger(&s0.bloch().unwrap()).completely_positive());
    }

    #[test]
    fn tabulated_refuses_bad_exponent() {
        let t = vec![0.0, 1.0, 2.0];
        let v = vec![Complex64::new(1.0, 0.0); 3];
        assert!(BathCorrelation::tabulated(t.clone(), v.clone(), 0.0).is_err());
        let g = BathCorrelation::tabulated(t, v, 2.0).unwrap();
        assert!((g.eval(0.5) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(g.eval(3.0), Complex64::new(0.0, 0.0));
        // box of length 2
        let f = halfline_fourier(&g, 0.0).unwrap();
        assert!((f.value.re - 2.0).abs() < 1e-9, "{:?}", f);
    }
}
