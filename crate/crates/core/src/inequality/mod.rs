//! Grid-certified verification of the elementary inequalities behind the
//! exterior stability argument.
//!
//! Throughout `f(x) = x / cosh x` and `T∞` is the root of `t tanh t = 1`.

mod certify;

pub use certify::MarginRow;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::geometry::{solve_neck_in, solve_t_infinity, Parametrization, SurfacePair};
use certify::{sweep_1d, sweep_triangle, Sweep};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    HoldsWithMargin,
    Violated {
        at: Vec<f64>,
    },
    /// Some cell could not be certified at the requested step.
    Inconclusive {
        at: Vec<f64>,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::HoldsWithMargin)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub region: String,
    pub grid_step: f64,
    pub cells: usize,
    pub worst_margin: f64,
    pub worst_at: Vec<f64>,
    /// Largest Lipschitz bound used by a certified cell.
    pub lipschitz_bound: f64,
    pub tail_threshold: Option<f64>,
    pub tail: String,
    pub notes: Vec<String>,
    pub verdict: Verdict,
    pub margin_table: Vec<MarginRow>,
}

impl VerificationReport {
    fn from_sweep(name: &str, region: String, s: Sweep, tail: Option<(f64, bool, String)>) -> Self {
        let mut verdict = match (&s.violated, &s.uncertified) {
            (Some(at), _) => Verdict::Violated { at: at.clone() },
            (None, Some(at)) => Verdict::Inconclusive { at: at.clone() },
            (None, None) => Verdict::HoldsWithMargin,
        };
        let (tail_threshold, tail_text) = match tail {
            Some((t, ok, text)) => {
                if !ok && verdict.holds() {
                    verdict = Verdict::Inconclusive { at: vec![t] };
                }
                (Some(t), text)
            }
            None => (None, String::new()),
        };
        Self {
            name: name.into(),
            region,
            grid_step: s.finest_step,
            cells: s.cells,
            worst_margin: s.worst_margin,
            worst_at: s.worst_at,
            lipschitz_bound: s.max_lipschitz,
            tail_threshold,
            tail: tail_text,
            notes: Vec::new(),
            verdict,
            margin_table: s.table,
        }
    }
}

pub fn t_infinity() -> f64 {
    solve_t_infinity(1e-15)
}

pub fn f(x: f64) -> f64 {
    x / x.cosh()
}

/// `f''(x) = (2x sinh²x - x cosh²x - 2 sinh x cosh x) / cosh³x`, written
/// with `tanh` and `sech` to stay finite.
pub fn f_second(x: f64) -> f64 {
    let (th, s) = (x.tanh(), 1.0 / x.cosh());
    s * (2.0 * x * th * th - x - 2.0 * th)
}

/// Bound for `|f'|` on `[a, b] ⊂ [0, ∞)`.
fn f_prime_bound(a: f64, b: f64) -> f64 {
    ((1.0 + b) / a.cosh()).min(1.0)
}

fn check_args(b_max: f64, step: f64, t_inf: f64) -> Result<()> {
    if !(step > 0.0) || !(step < 1.0) {
        return Err(domain("grid step must lie in (0, 1)"));
    }
    if !(b_max > t_inf) || !b_max.is_finite() {
        return Err(domain(format!(
            "b_max must be finite and exceed T∞ = {t_inf}"
        )));
    }
    Ok(())
}

/// `f(x) + f(2b - x) < 2b/(3b - 2T∞)` for `b ≥ T∞`, `x ≥ 0`.
///
/// By symmetry and the monotonicity of `f` it suffices to take
/// `x ∈ [T∞, b]`. In lattice coordinates `u = x`, `v = 2b - x` both
/// arguments of `f` are nodes, so `f` is tabulated once. For `b > b_max`
/// the left side is below `f(T∞) + f(b_max)` and the right side above 2/3.
pub fn verify_fineq(b_max: f64, grid_step: f64) -> Result<VerificationReport> {
    let t_inf = t_infinity();
    check_args(b_max, grid_step, t_inf)?;
    let n = (2.0 * (b_max - t_inf) / grid_step).ceil() as usize;
    let h = grid_step;
    let levels = ((0.25 / h).log2().floor().max(0.0) as u32).min(12);
    let table: Vec<f64> = (0..=n + (1 << levels))
        .map(|i| f(t_inf + h * i as f64))
        .collect();
    let rhs = |s: f64| s / (1.5 * s - 2.0 * t_inf);
    let rhs_slope = |s: f64| 2.0 * t_inf / (1.5 * s - 2.0 * t_inf).powi(2);
    let node = |i: usize| t_inf + h * i as f64;
    let sweep = sweep_triangle(
        n,
        h,
        levels,
        |i, j| rhs(node(i) + node(j)) - table[i] - table[j],
        |i, j, size| {
            let s0 = node(i) + node(j);
            let r = rhs_slope(s0);
            (
                f_prime_bound(node(i), node(i + size)) + r,
                f_prime_bound(node(j), node(j + size)) + r,
            )
        },
        // report (x, b)
        |i, j| (node(i), 0.5 * (node(i) + node(j))),
    );
    let tail_lhs = f(t_inf) + f(b_max);
    let ok = tail_lhs < 2.0 / 3.0;
    let tail = (
        b_max,
        ok,
        format!("for b >= {b_max}: f(T∞) + f(b_max) = {tail_lhs:.6} < 2/3 < 2b/(3b - 2T∞)"),
    );
    let mut r = VerificationReport::from_sweep(
        "fineq",
        format!("x in [T∞, b], b in [T∞, {b_max}], lattice (x, 2b - x)"),
        sweep,
        Some(tail),
    );
    r.notes
        .push("x > b follows from the symmetry x -> 2b - x".into());
    r.notes
        .push("0 <= x < T∞ follows from f(x) < f(T∞) and f(2b - x) < f(2b - T∞)".into());
    Ok(r)
}

/// `cosh c > (9/(4T∞)) c² - (9/(8T∞) + 3/2) c` for `c ≥ T∞ - 1/2`: grid on
/// `[T∞ - 1/2, max(b_max + 1/2, c*)]`, and for `c ≥ c* = sqrt(54/T∞)` the
/// bound `cosh c > c⁴/24 ≥ (9/(4T∞)) c²`.
pub fn verify_case1(b_max: f64, grid_step: f64) -> Result<VerificationReport> {
    let t_inf = t_infinity();
    check_args(b_max, grid_step, t_inf)?;
    let (qa, qb) = (9.0 / (4.0 * t_inf), 9.0 / (8.0 * t_inf) + 1.5);
    let g = |c: f64| c.cosh() - qa * c * c + qb * c;
    let c_tail = (54.0 / t_inf).sqrt();
    let (c0, c1) = (t_inf - 0.5, (b_max + 0.5).max(c_tail));
    let sweep = sweep_1d(c0, c1, grid_step, g, |_, b| b.sinh() + 2.0 * qa * b + qb);
    let ok = c_tail * c_tail * t_inf >= 54.0 * (1.0 - 1e-15) && c1 >= c_tail;
    let tail = (
        c_tail,
        ok,
        format!("for c >= sqrt(54/T∞) = {c_tail:.6}: cosh c > c^4/24 >= 9c^2/(4T∞)"),
    );
    let mut r = VerificationReport::from_sweep(
        "case1",
        format!("c in [{c0:.6}, {c1:.6}]"),
        sweep,
        Some(tail),
    );
    r.notes
        .push("the threshold c^2 > 54/T is read with T = T∞".into());
    r.notes.push(
        "Case 1 only needs c >= T∞ + 1/2; the sweep covers the stated range c >= T∞ - 1/2".into(),
    );
    Ok(r)
}

/// `f''(x) < 0.1` on `[0, ∞)`: grid on `[0, X]` with `|f'''| ≤ (3 + 5x)/cosh x`,
/// tail `|f''| ≤ (3x + 2)/cosh x < 0.1` for `x ≥ X`. `f''` is odd, so the
/// bound cannot hold on all of R; the negative half-line is reported in
/// the notes.
pub fn verify_f_second_derivative_bound(grid_step: f64) -> Result<VerificationReport> {
    if !(grid_step > 0.0) || !(grid_step < 1.0) {
        return Err(domain("grid step must lie in (0, 1)"));
    }
    let x_tail = 8.0;
    let sweep = sweep_1d(
        0.0,
        x_tail,
        grid_step,
        |x| 0.1 - f_second(x),
        |a, b| (3.0 + 5.0 * b) / a.cosh(),
    );
    let tail_value = (3.0 * x_tail + 2.0) / x_tail.cosh();
    let tail = (
        x_tail,
        tail_value < 0.1,
        format!("for x >= {x_tail}: |f''| <= (3x + 2)/cosh x <= {tail_value:.3e} < 0.1"),
    );
    let mut r = VerificationReport::from_sweep(
        "f-second-derivative",
        "x in [0, 8]".into(),
        sweep,
        Some(tail),
    );
    let neg_max = (0..=8000)
        .map(|i| f_second(-f64::from(i) * 1e-3))
        .fold(f64::NEG_INFINITY, f64::max);
    r.notes.push(format!(
        "f'' is odd: its maximum on x < 0 is about {neg_max:.4}, so the bound fails there; Case 2 only uses x >= T∞ - 1/2 > 0"
    ));
    Ok(r)
}

/// Slope bound of `2b(3b - 2T)/(1.925b + 0.05T)` for `b ≥ T`.
const CASE2_SLOPE: f64 = 12.15 / 3.705625;

/// `cosh b > 2b(3b - 2T∞)/(1.925b + 0.05T∞)` for `b ≥ T∞`; tail from
/// `cosh b > b²/2` and the right side below `(6/1.925) b`.
pub fn verify_case2(b_max: f64, grid_step: f64) -> Result<VerificationReport> {
    let t_inf = t_infinity();
    check_args(b_max, grid_step, t_inf)?;
    let g = |b: f64| b.cosh() - 2.0 * b * (3.0 * b - 2.0 * t_inf) / (1.925 * b + 0.05 * t_inf);
    let b_tail = 12.0 / 1.925;
    let b1 = b_max.max(b_tail);
    let sweep = sweep_1d(t_inf, b1, grid_step, g, |_, b| b.sinh() + CASE2_SLOPE);
    let tail = (
        b_tail,
        b1 >= b_tail,
        format!("for b >= 12/1.925 = {b_tail:.4}: cosh b > b^2/2 >= (6/1.925) b > right side"),
    );
    Ok(VerificationReport::from_sweep(
        "case2",
        format!("b in [T∞, {b1}]"),
        sweep,
        Some(tail),
    ))
}

/// `α = (p - 1) T_p`, `β = (p + 1) T_p` in the rational parametrization.
fn alpha_beta(p: SurfacePair) -> Result<(f64, f64)> {
    let neck = solve_neck_in(p, Parametrization::Rational, 1e-12)?;
    let q = p.p();
    Ok(((q - 1.0) * neck.t, (q + 1.0) * neck.t))
}

/// `T_p a(T_p t) < 1/(3(t - 2/3))` for `t ≥ 1`, one report per `p`.
/// With `T_p a(T_p t) = (α sech αt + β sech βt)/2`, the tail follows from
/// `3 (α + β) t e^{-αt} < 1`, which is decreasing for `t > 1/α`.
pub fn verify_aux_bound(
    p_list: &[SurfacePair],
    t_max: f64,
    grid_step: f64,
) -> Result<Vec<VerificationReport>> {
    if !(t_max >= 1.0) || !(grid_step > 0.0) {
        return Err(domain("need t_max >= 1 and a positive grid step"));
    }
    p_list
        .iter()
        .map(|&p| {
            let (alpha, beta) = alpha_beta(p)?;
            let lhs = |t: f64| 0.5 * (alpha / (alpha * t).cosh() + beta / (beta * t).cosh());
            let g = |t: f64| 1.0 / (3.0 * (t - 2.0 / 3.0)) - lhs(t);
            // extend the grid until the tail estimate applies
            let tail_ok =
                |t: f64| t > 1.0 / alpha && 3.0 * (alpha + beta) * t * (-alpha * t).exp() < 1.0;
            let mut t1 = t_max;
            while !tail_ok(t1) && t1 < 1e7 {
                t1 *= 2.0;
            }
            let lip = |a: f64, _: f64| {
                (a - 2.0 / 3.0).powi(-2) / 3.0 + 0.25 * (alpha * alpha + beta * beta)
            };
            let sweep = sweep_1d(1.0, t1, grid_step, g, lip);
            let tail = (
                t1,
                tail_ok(t1),
                format!("for t >= {t1}: 3(α + β) t e^(-αt) < 1 with α = {alpha:.6}, β = {beta:.6}"),
            );
            Ok(VerificationReport::from_sweep(
                &format!("aux-bound p={}/{}", p.k(), p.l()),
                format!("t in [1, {t1}]"),
                sweep,
                Some(tail),
            ))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PtpCheck {
    pub p: f64,
    #[serde(rename = "T_p")]
    pub t_p: f64,
    pub p_tp: f64,
    pub p_minus_one_tp: f64,
    pub upper_holds: bool,
    pub lower_holds: bool,
    /// Finite-difference slopes of `a / cosh(at)` in `a` were all negative.
    pub monotone_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PtpReport {
    pub t_infinity: f64,
    pub checks: Vec<PtpCheck>,
    pub all_hold: bool,
}

/// `p T_p > T∞`, `(p - 1) T_p < T∞`, and `a / cosh(at)` decreasing in `a`
/// for `a > T∞`, `t ≥ 1` (sampled).
pub fn verify_ptp_bounds(p_list: &[SurfacePair]) -> Result<PtpReport> {
    let t_inf = t_infinity();
    let phi = |a: f64, t: f64| a / (a * t).cosh();
    let mut monotone = true;
    for t in [1.0, 1.5, 2.0, 5.0, 20.0] {
        for i in 0..2000 {
            let a = t_inf + 1e-3 + 5e-3 * f64::from(i);
            let d = 1e-6;
            if !(phi(a + d, t) - phi(a, t) < 0.0) {
                monotone = false;
            }
        }
    }
    let checks = p_list
        .iter()
        .map(|&p| {
            let neck = solve_neck_in(p, Parametrization::Rational, 1e-12)?;
            let q = p.p();
            Ok(PtpCheck {
                p: q,
                t_p: neck.t,
                p_tp: q * neck.t,
                p_minus_one_tp: (q - 1.0) * neck.t,
                upper_holds: q * neck.t > t_inf,
                lower_holds: (q - 1.0) * neck.t < t_inf,
                monotone_holds: monotone,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_hold = checks
        .iter()
        .all(|c| c.upper_holds && c.lower_holds && c.monotone_holds);
    Ok(PtpReport {
        t_infinity: t_inf,
        checks,
        all_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(k: u32, l: u32) -> SurfacePair {
        SurfacePair::from_ratio(k, l).unwrap()
    }

    #[test]
    fn corner_values() {
        let t = t_infinity();
        assert!((2.0 * f(t) - 1.3255).abs() < 1e-3);
        assert_eq!(f_second(0.0), 0.0);
        let direct = |x: f64| {
            let (s, c) = (x.sinh(), x.cosh());
            (2.0 * x * s * s - x * c * c - 2.0 * s * c) / c.powi(3)
        };
        for x in [-3.0, -0.4, 0.3, 1.7, 6.0] {
            assert!((f_second(x) - direct(x)).abs() < 1e-13);
        }
        // case 2 at b = T∞
        let rhs = 2.0 * t * t / (1.975 * t);
        assert!((t.cosh() - 1.810).abs() < 1e-3 && (rhs - 1.215).abs() < 1e-3);
    }

    #[test]
    fn one_dimensional_suites_hold() {
        for r in [
            verify_case1(50.0, 1e-3).unwrap(),
            verify_case2(50.0, 1e-3).unwrap(),
            verify_f_second_derivative_bound(1e-3).unwrap(),
        ] {
            assert!(r.verdict.holds(), "{}: {:?}", r.name, r.verdict);
            assert!(r.worst_margin > r.grid_step * 0.0);
        }
    }

    #[test]
    fn fineq_small_box() {
        let r = verify_fineq(12.0, 1e-3).unwrap();
        assert!(r.verdict.holds(), "{:?}", r.verdict);
        assert!(r.worst_margin > 0.0);
        // f(5) is too large for the tail estimate
        let short = verify_fineq(5.0, 1e-3).unwrap();
        assert!(matches!(short.verdict, Verdict::Inconclusive { .. }));
    }

    #[test]
    fn aux_and_ptp() {
        let ps = [pair(3, 2), pair(2, 1), pair(10, 1)];
        for r in verify_aux_bound(&ps, 100.0, 1e-3).unwrap() {
            assert!(r.verdict.holds(), "{}: {:?}", r.name, r.verdict);
        }
        let p = verify_ptp_bounds(&[pair(2, 1), pair(1001, 1000), pair(10, 1)]).unwrap();
        assert!(p.all_hold);
    }

    #[test]
    fn bad_arguments() {
        assert!(verify_fineq(1.0, 1e-3).is_err());
        assert!(verify_case2(50.0, 0.0).is_err());
        assert!(verify_aux_bound(&[pair(2, 1)], 0.5, 1e-3).is_err());
    }

    proptest! {
        #[test]
        fn fineq_lhs_symmetric(x in -20.0f64..20.0, b in 1.2f64..30.0) {
            let l1 = f(x) + f(2.0 * b - x);
            let l2 = f(2.0 * b - x) + f(2.0 * b - (2.0 * b - x));
            prop_assert!((l1 - l2).abs() < 1e-14);
        }

        #[test]
        fn f_shape(x in 0.0f64..8.0) {
            let t = t_infinity();
            let d = f(x + 1e-6) - f(x);
            if x + 1e-6 < t - 1e-4 {
                prop_assert!(d > 0.0);
            } else if x > t + 1e-4 {
                prop_assert!(d < 0.0);
            }
        }
    }
}
