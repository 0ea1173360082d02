//! Dormand–Prince 5(4) with adaptive steps.

use nalgebra::{ComplexField, DVector};

use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Real};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Initial step; 0 picks one from the tolerances.
    pub h0: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_steps: 2_000_000, h0: 0.0 }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates y' = f(t, y) and returns y at every point of `grid` (ascending,
/// grid[0] is the initial time).
pub fn integrate<R, N, F>(mut f: F, y0: &DVector<N>, grid: &[R], opts: &OdeOptions) -> Result<Vec<DVector<N>>>
where
    R: Real,
    N: ComplexField<RealField = R> + Copy,
    F: FnMut(R, &DVector<N>) -> DVector<N>,
{
    let mut out = Vec::with_capacity(grid.len());
    let Some(&t_start) = grid.first() else { return Ok(out) };
    let rtol: R = real(opts.rtol);
    let atol: R = real(opts.atol);
    let mut y = y0.clone();
    let mut t = t_start;
    let mut k1 = f(t, &y);
    let mut h: R = if opts.h0 > 0.0 {
        real(opts.h0)
    } else {
        let scale = y.iter().fold(R::zero(), |m, v| m.max(v.modulus())) * rtol + atol;
        let slope = k1.iter().fold(R::zero(), |m, v| m.max(v.modulus()));
        if slope > R::zero() { (scale / slope).powf(real(0.2)) * real(0.1) } else { real(1e-3) }
    };
    let mut steps = 0usize;
    out.push(y.clone());
    for &target in &grid[1..] {
        while t < target {
            let last = t + h >= target;
            let hs = if last { target - t } else { h };
            if last && hs <= real::<R>(1e-14) * (R::one() + t.abs()) {
                t = target;
                continue;
            }
            let mut k = vec![k1.clone()];
            for s in 1..7 {
                let mut ys = y.clone();
                for (j, kj) in k.iter().enumerate() {
                    if A[s][j] != 0.0 {
                        ys.axpy(N::from_real(hs * real(A[s][j])), kj, N::one());
                    }
                }
                k.push(f(t + hs * real(C[s]), &ys));
            }
            let mut y_new = y.clone();
            for j in 0..6 {
                if A[6][j] != 0.0 {
                    y_new.axpy(N::from_real(hs * real(A[6][j])), &k[j], N::one());
                }
            }
            let mut err = R::zero();
            for i in 0..y.len() {
                let mut e = N::zero();
                for j in 0..7 {
                    if E[j] != 0.0 {
                        e += k[j][i] * N::from_real(hs * real(E[j]));
                    }
                }
                let sc = atol + rtol * y[i].modulus().max(y_new[i].modulus());
                let r = e.modulus() / sc;
                err += r * r;
            }
            err = (err / real(y.len().max(1) as f64)).sqrt();
            steps += 1;
            if steps > opts.max_steps || hs.abs() < real::<R>(1e-14) * (R::one() + t.abs()) {
                return Err(Error::IntegrationToleranceExceeded { t: to_f64(t), step: to_f64(hs) });
            }
            let accepted = err <= R::one();
            if accepted {
                t = if last { target } else { t + hs };
                y = y_new;
                k1 = k.pop().unwrap();
            }
            let fac = if err > R::zero() { real::<R>(0.9) * err.powf(real(-0.2)) } else { real(5.0) };
            let fac = fac.max(real(0.2)).min(real(5.0));
            if !(last && accepted) || hs * fac < h {
                h = hs * fac;
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
