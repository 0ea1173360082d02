//! Adaptive Gauss–Kronrod quadrature and half-line Fourier integrals.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod-15 estimate and |K15 − G7| on [a, b].
fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Cap on periods summed beyond the initial segment.
    pub max_periods: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-11, rel_tol: 1e-11, max_intervals: 4000, max_periods: 4000 }
    }
}

/// Value with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub abs_error: f64,
}

/// Globally adaptive bisection of the worst interval.
pub fn integrate(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, opts: &QuadOptions) -> Result<Estimate> {
    let mut parts = vec![(a, b, gk15(f, a, b))];
    loop {
        let value: Complex64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if err <= target {
            return Ok(Estimate { value, abs_error: err });
        }
        if parts.len() >= opts.max_intervals {
            return Err(Error::IntegralNotConverged { estimate: err, target });
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.partial_cmp(&y.1 .2 .1).unwrap())
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::IntegralNotConverged { estimate: err, target });
        }
        parts.push((lo, mid, gk15(f, lo, mid)));
        parts.push((mid, hi, gk15(f, mid, hi)));
    }
}

/// ∫_a^∞ f through t = a/u (a > 0), u ∈ (0, 1].
pub fn integrate_tail(f: &dyn Fn(f64) -> Complex64, a: f64, opts: &QuadOptions) -> Result<Estimate> {
    let g = move |u: f64| {
        if u <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let t = a / u;
        let v = f(t);
        if v == Complex64::new(0.0, 0.0) { v } else { v * (a / (u * u)) }
    };
    integrate(&g, 0.0, 1.0, opts)
}

/// Levin u-transform of partial sums S_0..S_k with terms a_n = S_n − S_{n−1}.
fn levin_u(sums: &[Complex64], terms: &[Complex64]) -> Option<Complex64> {
    let k = sums.len() - 1;
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    let mut binom = 1.0;
    let kf = k as f64;
    for j in 0..=k {
        let omega = terms[j] * (j as f64 + 1.0);
        if omega.norm() == 0.0 {
            return None;
        }
        let ratio = ((j as f64 + 1.0) / (kf + 1.0)).powf(kf - 2.0);
        let w = binom * ratio * if j % 2 == 0 { 1.0 } else { -1.0 };
        num += sums[j] * w / omega;
        den += w / omega;
        binom = binom * (kf - j as f64) / (j as f64 + 1.0);
    }
    let v = num / den;
    v.is_finite().then_some(v)
}

/// F(ζ) = ∫_0^∞ e^{iζt} f(t) dt for f decaying on the time scale `scale`.
///
/// ζ = 0 uses a mapped tail. Otherwise [0, T₀] is integrated adaptively and the
/// rest as a series over half periods π/|ζ|. Those terms alternate in sign and
/// their partial sums are accelerated by the Levin u-transform.
pub fn halfline(f: &dyn Fn(f64) -> Complex64, zeta: f64, scale: f64, opts: &QuadOptions) -> Result<Estimate> {
    let t0 = 10.0 * scale;
    if zeta == 0.0 {
        let head = integrate(f, 0.0, t0, opts)?;
        let tail = integrate_tail(f, t0, opts)?;
        return Ok(Estimate { value: head.value + tail.value, abs_error: head.abs_error + tail.abs_error });
    }
    let period = 2.0 * PI / zeta.abs();
    let n0 = (t0 / period).ceil().max(1.0);
    let t0 = n0 * period;
    let g = |t: f64| f(t) * Complex64::new(0.0, zeta * t).exp();
    let mut head = Estimate { value: Complex64::new(0.0, 0.0), abs_error: 0.0 };
    let chunks = (n0 as usize).min(64);
    let width = t0 / chunks as f64;
    for c in 0..chunks {
        let e = integrate(&g, c as f64 * width, (c + 1) as f64 * width, opts)?;
        head.value += e.value;
        head.abs_error += e.abs_error;
    }
    let mut sums: Vec<Complex64> = Vec::new();
    let mut terms: Vec<Complex64> = Vec::new();
    let mut running = Complex64::new(0.0, 0.0);
    let mut quad_err = head.abs_error;
    let mut prev: Option<Complex64> = None;
    let mut small_run = 0;
    let half = 0.5 * period;
    for k in 0..2 * opts.max_periods {
        let lo = t0 + k as f64 * half;
        let e = integrate(&g, lo, lo + half, opts)?;
        quad_err += e.abs_error;
        running += e.value;
        terms.push(e.value);
        sums.push(running);
        let target = opts.abs_tol.max(opts.rel_tol * (head.value + running).norm());
        if e.value.norm() <= 0.1 * target {
            small_run += 1;
            if small_run >= 3 {
                return Ok(Estimate { value: head.value + running, abs_error: quad_err + e.value.norm() });
            }
        } else {
            small_run = 0;
        }
        if sums.len() >= 4 {
            let window = sums.len().min(14);
            let start = sums.len() - window;
            if let Some(acc) = levin_u(&sums[start..], &terms[start..]) {
                if let Some(p) = prev {
                    let diff = (acc - p).norm();
                    if diff <= target && sums.len() >= 8 {
                        return Ok(Estimate { value: head.value + acc, abs_error: quad_err + diff });
                    }
                }
                prev = Some(acc);
            }
        }
    }
    Err(Error::IntegralNotConverged { estimate: prev.map_or(f64::INFINITY, |p| (p - running).norm()), target: opts.abs_tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_interval() {
        let e = integrate(&|x: f64| Complex64::new(x.sin(), x * x), 0.0, PI, &QuadOptions::default()).unwrap();
        assert!((e.value - Complex64::new(2.0, PI.powi(3) / 3.0)).norm() < 1e-13);
    }

    #[test]
    fn exponential_transform() {
        let (l, z) = (0.7, 1.3);
        let e = halfline(&|t: f64| Complex64::new((-l * t).exp(), 0.0), z, 1.0 / l, &QuadOptions::default()).unwrap();
        let exact = Complex64::new(l, z) / (l * l + z * z);
        assert!((e.value - exact).norm() < 1e-11);
        let e0 = halfline(&|t: f64| Complex64::new((-l * t).exp(), 0.0), 0.0, 1.0 / l, &QuadOptions::default()).unwrap();
        assert!((e0.value.re - 1.0 / l).abs() < 1e-11);
    }

    #[test]
    fn algebraic_tail() {
        // ∫_0^∞ e^{iζt}/(1+t)² dt, tail ~ 1/t²
        let z = 1.0;
        let f = |t: f64| Complex64::new(1.0 / ((1.0 + t) * (1.0 + t)), 0.0);
        let e = halfline(&f, z, 1.0, &QuadOptions::default()).unwrap();
        // integration by parts: ∫ e^{iζt}/(1+t)² = 1 + iζ ∫ e^{iζt}/(1+t)
        let g = |t: f64| Complex64::new(1.0 / (1.0 + t), 0.0);
        let e1 = halfline(&g, z, 1.0, &QuadOptions::default()).unwrap();
        assert!((e.value - (1.0 + Complex64::new(0.0, z) * e1.value)).norm() < 1e-9);
        let zero = halfline(&f, 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert!((zero.value.re - 1.0).abs() < 1e-11);
    }
}
