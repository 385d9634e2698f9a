//! Initial-value integration of `g'' + q g = 0` with a Robin start.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootingResult {
    pub first_zero: Option<f64>,
    pub survived_to: f64,
    /// `(t, g, g')` at accepted steps.
    pub samples: Vec<[f64; 3]>,
}

impl ShootingResult {
    pub fn survived(&self) -> bool {
        self.first_zero.is_none()
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step; returns the 5th-order state and error estimate.
fn dp_step(q: &dyn Fn(f64) -> f64, t: f64, y: [f64; 2], h: f64) -> ([f64; 2], [f64; 2]) {
    let f = |t: f64, y: [f64; 2]| [y[1], -q(t) * y[0]];
    let mut k = [[0.0; 2]; 7];
    for s in 0..7 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s] = f(t + C[s] * h, ys);
    }
    let mut y5 = y;
    let mut err = [0.0; 2];
    for s in 0..7 {
        for c in 0..2 {
            y5[c] += h * B5[s] * k[s][c];
            err[c] += h * (B5[s] - B4[s]) * k[s][c];
        }
    }
    (y5, err)
}

/// Integrates `g'' + q g = 0`, `g(t0) = 1`, `g'(t0) = robin_coef`, up to
/// `t_max` with adaptive Dormand-Prince 5(4). The first sign change of `g`
/// is located by bisection on the step length to 1e-10.
pub fn shoot_scalar(
    q: &dyn Fn(f64) -> f64,
    t0: f64,
    robin_coef: f64,
    t_max: f64,
) -> Result<ShootingResult> {
    shoot_with(q, t0, robin_coef, t_max, 1e-11, 1e-12)
}

pub(crate) fn shoot_with(
    q: &dyn Fn(f64) -> f64,
    t0: f64,
    robin_coef: f64,
    t_max: f64,
    rtol: f64,
    atol: f64,
) -> Result<ShootingResult> {
    if !(t_max > t0) {
        return Err(crate::error::domain("t_max must exceed t0"));
    }
    let mut t = t0;
    let mut y = [1.0, robin_coef];
    let mut h = 1e-3 * (1.0 + t0.abs()).min(t_max - t0);
    let mut samples = vec![[t, y[0], y[1]]];
    while t < t_max {
        let step = h.min(t_max - t);
        let (y5, err) = dp_step(q, t, y, step);
        let scale = |c: usize| atol + rtol * y[c].abs().max(y5[c].abs());
        let e = ((err[0] / scale(0)).powi(2) + (err[1] / scale(1)).powi(2)).sqrt()
            / std::f64::consts::SQRT_2;
        if e <= 1.0 {
            if y5[0] == 0.0 || y5[0].signum() != y[0].signum() {
                let (mut lo, mut hi) = (0.0, step);
                while hi - lo > 1e-10 {
                    let mid = 0.5 * (lo + hi);
                    let (ym, _) = dp_step(q, t, y, mid);
                    if ym[0].signum() == y[0].signum() && ym[0] != 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let zero = t + 0.5 * (lo + hi);
                samples.push([t + step, y5[0], y5[1]]);
                return Ok(ShootingResult {
                    first_zero: Some(zero),
                    survived_to: t + step,
                    samples,
                });
            }
            t += step;
            y = y5;
            samples.push([t, y[0], y[1]]);
        }
        let factor = if e == 0.0 {
            5.0
        } else {
            (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = step * factor;
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Stiffness { t });
        }
    }
    Ok(ShootingResult {
        first_zero: None,
        survived_to: t_max,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonVerdict {
    pub samples_checked: usize,
    /// Smallest `q1 - q2` seen.
    pub min_gap: f64,
    pub min_gap_at: f64,
    pub first: ShootingResult,
    pub second: ShootingResult,
    /// False only if the first problem survives and the second does not.
    pub consistent: bool,
}

/// Checks `q1 > q2` on a sample grid and `b1 < b2`, then shoots both.
/// Survival of the first problem should force survival of the second.
pub fn oscillation_compare(
    q1: &dyn Fn(f64) -> f64,
    q2: &dyn Fn(f64) -> f64,
    b1: f64,
    b2: f64,
    t0: f64,
    t_max: f64,
) -> Result<ComparisonVerdict> {
    if !(b1 < b2) {
        return Err(Error::Hypothesis {
            at: t0,
            detail: format!("Robin coefficients not ordered: {b1} >= {b2}"),
        });
    }
    // dense near t0, geometric further out
    let mut points = Vec::new();
    let dense_end = (t0 + 10.0).min(t_max);
    let n_dense = 10_000;
    for i in 0..=n_dense {
        points.push(t0 + (dense_end - t0) * f64::from(i) / f64::from(n_dense));
    }
    let mut s = dense_end;
    while s < t_max {
        s = (s * 1.001).min(t_max);
        points.push(s);
    }
    let (mut min_gap, mut min_gap_at) = (f64::INFINITY, t0);
    for &t in &points {
        let gap = q1(t) - q2(t);
        if !(gap > 0.0) {
            return Err(Error::Hypothesis {
                at: t,
                detail: format!("q1 - q2 = {gap} is not positive"),
            });
        }
        if gap < min_gap {
            min_gap = gap;
            min_gap_at = t;
        }
    }
    let first = shoot_scalar(q1, t0, b1, t_max)?;
    let second = shoot_scalar(q2, t0, b2, t_max)?;
    let consistent = !(first.survived() && !second.survived());
    Ok(ComparisonVerdict {
        samples_checked: points.len(),
        min_gap,
        min_gap_at,
        first,
        second,
        consistent,
    })
}
