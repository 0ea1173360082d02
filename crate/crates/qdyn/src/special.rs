//! Complex trigamma and log-gamma.

use num_complex::Complex64;
use std::f64::consts::PI;

/// ψ'(z) = Σ_{n≥0} 1/(z+n)², for Re z > 0.
///
/// Shifted up by the recurrence ψ'(z) = ψ'(z+1) + 1/z² until |z| ≥ 20, then
/// the asymptotic Bernoulli series.
pub fn trigamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.norm() < 20.0 {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let w = 1.0 / z;
    let w2 = w * w;
    // 1/z + 1/2z² + Σ B_2k / z^{2k+1}
    let coeffs = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = w * w2;
    for c in coeffs {
        series += p * c;
        p *= w2;
    }
    acc + w + 0.5 * w2 + series
}

/// Re ln Γ(z) = ln |Γ(z)|, for Re z > 0.
pub fn ln_abs_gamma(z: Complex64) -> f64 {
    let mut z = z;
    let mut shift = 0.0;
    while z.norm() < 20.0 {
        shift += z.norm().ln();
        z += 1.0;
    }
    let w = 1.0 / z;
    let w2 = w * w;
    let coeffs = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0];
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = w;
    for c in coeffs {
        series += p * c;
        p *= w2;
    }
    let stirling = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series;
    stirling.re - shift
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trigamma_values() {
        // ψ'(1) = π²/6, ψ'(1/2) = π²/2
        assert!((trigamma(Complex64::new(1.0, 0.0)).re - PI * PI / 6.0).abs() < 1e-14);
        assert!((trigamma(Complex64::new(0.5, 0.0)).re - PI * PI / 2.0).abs() < 1e-13);
        // against direct summation with an integral tail
        let z = Complex64::new(1.3, 2.7);
        let mut s = Complex64::new(0.0, 0.0);
        let n = 200_000;
        for k in 0..n {
            s += 1.0 / ((z + k as f64) * (z + k as f64));
        }
        let zn = z + n as f64;
        s += 1.0 / zn + 0.5 / (zn * zn);
        assert!((trigamma(z) - s).norm() < 1e-12);
    }

    #[test]
    fn log_gamma_values() {
        // Γ(5) = 24, Γ(1/2) = √π, |Γ(1+iy)|² = πy/sinh(πy)
        assert!((ln_abs_gamma(Complex64::new(5.0, 0.0)) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_abs_gamma(Complex64::new(0.5, 0.0)) - 0.5 * PI.ln()).abs() < 1e-13);
        for &y in &[0.3, 2.0, 11.0, 40.0] {
            let exact = 0.5 * (PI * y / (PI * y).sinh()).ln();
            assert!((ln_abs_gamma(Complex64::new(1.0, y)) - exact).abs() < 1e-11 * (1.0 + exact.abs()));
        }
    }
}
