use serde::Serialize;

use super::discretize::assemble;
use super::{BoundaryCondition, Dimension, Parity, SampledVector, SlProblem, Spectrum};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Lower bound on the starting number of intervals.
    pub initial_intervals: usize,
    /// Upper bound on the starting grid step.
    pub max_initial_step: f64,
    pub max_intervals: usize,
    pub with_vectors: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            initial_intervals: 64,
            max_initial_step: 0.02,
            max_intervals: 1 << 18,
            with_vectors: true,
        }
    }
}

impl SolverOptions {
    fn start(&self, p: &SlProblem) -> usize {
        let by_step = ((p.t1 - p.t0) / self.max_initial_step).ceil() as usize;
        self.initial_intervals.max(by_step).max(16)
    }
}

/// Lowest `count` eigenvalues, grid-doubled until successive Richardson
/// values agree to `tol`.
pub fn eigenvalues(problem: &SlProblem, count: usize, tol: f64) -> Result<Spectrum> {
    eigenvalues_with(problem, count, tol, &SolverOptions::default())
}

pub fn eigenvalues_with(
    problem: &SlProblem,
    count: usize,
    tol: f64,
    opts: &SolverOptions,
) -> Result<Spectrum> {
    if count == 0 {
        return Err(domain("count must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let abs_tol = tol * 1e-4;
    let mut n = opts.start(problem);
    let mut coarse = assemble(problem, n)?.lowest(count, abs_tol)?;
    let mut prev: Option<Vec<f64>> = None;
    loop {
        if 2 * n > opts.max_intervals {
            return Err(Error::Convergence {
                max_intervals: opts.max_intervals,
                best: prev.unwrap_or(coarse),
            });
        }
        let pencil = assemble(problem, 2 * n)?;
        let fine = pencil.lowest(count, abs_tol)?;
        let rich: Vec<f64> = fine
            .iter()
            .zip(&coarse)
            .map(|(f, c)| (4.0 * f - c) / 3.0)
            .collect();
        if let Some(p) = &prev {
            let diffs: Vec<f64> = rich.iter().zip(p).map(|(a, b)| (a - b).abs()).collect();
            if diffs.iter().all(|d| *d < tol) {
                let estimate: Vec<f64> = fine
                    .iter()
                    .zip(&coarse)
                    .zip(&diffs)
                    .map(|((f, c), d)| (f - c).abs().max(*d))
                    .collect();
                let (eigenvectors, parity) = if opts.with_vectors {
                    vectors(&pencil, &fine, problem)
                } else {
                    (Vec::new(), Vec::new())
                };
                return Ok(Spectrum {
                    eigenvalues: rich,
                    finest: fine,
                    eigenvectors,
                    parity,
                    grid_size: 2 * n,
                    convergence_estimate: estimate,
                });
            }
        }
        prev = Some(rich);
        coarse = fine;
        n *= 2;
    }
}

fn vectors(
    pencil: &super::DiscretePencil,
    fine: &[f64],
    problem: &SlProblem,
) -> (Vec<SampledVector>, Vec<Parity>) {
    let mut done: Vec<(f64, Vec<f64>)> = Vec::new();
    let scale = fine.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for &lam in fine {
        let x = pencil.eigenvector(lam, &done, 1e-6 * scale);
        done.push((lam, x));
    }
    let samples: Vec<SampledVector> = done.iter().map(|(_, x)| pencil.sample(x)).collect();
    let symmetric = (problem.t0 + problem.t1).abs() <= 1e-12 * problem.t1.abs()
        && problem.dimension == Dimension::Vector2;
    let parity = samples
        .iter()
        .map(|s| {
            if symmetric {
                classify_parity(s)
            } else {
                Parity::None
            }
        })
        .collect();
    (samples, parity)
}

/// Parity of a sample on a node set symmetric about 0.
fn classify_parity(s: &SampledVector) -> Parity {
    let n = s.h.len();
    let (mut even1, mut odd1, mut even2, mut odd2) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let (a, b) = (s.h[i], s.h[n - 1 - i]);
        even1 += (a[0] + b[0]).powi(2);
        odd1 += (a[0] - b[0]).powi(2);
        even2 += (a[1] + b[1]).powi(2);
        odd2 += (a[1] - b[1]).powi(2);
    }
    let total = even1 + odd1 + even2 + odd2;
    let tol = 1e-12 * total;
    if odd1 <= tol && even2 <= tol {
        Parity::Plus
    } else if even1 <= tol && odd2 <= tol {
        Parity::Minus
    } else {
        Parity::None
    }
}

/// Spectrum of one parity family on a symmetric interval `[-T, T]`, by
/// reduction to `[0, T]`.
pub fn eigenvalues_parity(
    problem: &SlProblem,
    parity: Parity,
    count: usize,
    tol: f64,
) -> Result<Spectrum> {
    eigenvalues_parity_with(problem, parity, count, tol, &SolverOptions::default())
}

pub(crate) fn half_problem(problem: &SlProblem, parity: Parity) -> Result<SlProblem> {
    check_symmetric(problem)?;
    let left = match parity {
        Parity::Plus => [BoundaryCondition::NEUMANN, BoundaryCondition::Dirichlet],
        Parity::Minus => [BoundaryCondition::Dirichlet, BoundaryCondition::NEUMANN],
        Parity::None => return Err(domain("parity must be plus or minus")),
    };
    Ok(problem
        .clone()
        .with_interval(0.0, problem.t1)
        .with_left_components(left))
}

pub(crate) fn eigenvalues_parity_with(
    problem: &SlProblem,
    parity: Parity,
    count: usize,
    tol: f64,
    opts: &SolverOptions,
) -> Result<Spectrum> {
    let half = half_problem(problem, parity)?;
    let mut spec = eigenvalues_with(&half, count, tol, opts)?;
    let (s1, s2) = match parity {
        Parity::Plus => (1.0, -1.0),
        _ => (-1.0, 1.0),
    };
    spec.eigenvectors = spec
        .eigenvectors
        .iter()
        .map(|v| {
            let n = v.t.len();
            let mut t: Vec<f64> = v.t[1..].iter().rev().map(|x| -x).collect();
            let mut h: Vec<[f64; 2]> = v.h[1..]
                .iter()
                .rev()
                .map(|x| [s1 * x[0], s2 * x[1]])
                .collect();
            t.extend_from_slice(&v.t);
            h.extend_from_slice(&v.h);
            debug_assert_eq!(t.len(), 2 * n - 1);
            // renormalise over the full interval
            let c = std::f64::consts::FRAC_1_SQRT_2;
            h.iter_mut().for_each(|x| *x = [c * x[0], c * x[1]]);
            SampledVector { t, h }
        })
        .collect();
    spec.parity = vec![parity; spec.eigenvectors.len()];
    Ok(spec)
}

fn check_symmetric(p: &SlProblem) -> Result<()> {
    let t1 = p.t1;
    if (p.t0 + t1).abs() > 1e-12 * t1.abs() {
        return Err(domain("interval is not symmetric about 0"));
    }
    if p.dimension != Dimension::Vector2 {
        return Err(domain("parity reduction needs a 2-vector problem"));
    }
    for i in 1..=64 {
        let t = t1 * f64::from(i) / 64.0;
        let (a, b) = (p.potential_at(t), p.potential_at(-t));
        let scale = 1.0 + a[0][0].abs() + a[1][1].abs() + a[0][1].abs();
        let bad = (a[0][0] - b[0][0]).abs() > 1e-10 * scale
            || (a[1][1] - b[1][1]).abs() > 1e-10 * scale
            || (a[0][1] + b[0][1]).abs() > 1e-10 * scale;
        let (w, wm) = (p.weight_at(t), p.weight_at(-t));
        if bad || (w - wm).abs() > 1e-10 * w {
            return Err(domain(format!(
                "potential or weight lacks the parity symmetry at t = {t}"
            )));
        }
    }
    for c in 0..2 {
        let ok = match (p.left[c], p.right[c]) {
            (BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet) => true,
            (
                BoundaryCondition::Robin { coefficient: a },
                BoundaryCondition::Robin { coefficient: b },
            ) => (a + b).abs() <= 1e-12 * (1.0 + b.abs()),
            _ => false,
        };
        if !ok {
            return Err(domain("boundary conditions are not mirror images"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
enum Sign {
    Negative,
    Zero,
    Positive,
}

fn classify(lam: f64, est: f64, zero_tol: f64) -> Result<Sign> {
    if lam + est < -zero_tol {
        Ok(Sign::Negative)
    } else if lam.abs() + est <= zero_tol {
        Ok(Sign::Zero)
    } else if lam - est > zero_tol {
        Ok(Sign::Positive)
    } else {
        Err(Error::Indeterminate {
            eigenvalue: lam,
            estimate: est,
            zero_tol,
        })
    }
}

/// Certified number of eigenvalues below `-zero_tol`. Nothing is assumed
/// about the spectrum above `-zero_tol`, so this works when eigenvalues
/// accumulate at zero. Returns the count and the spectrum used.
pub fn count_negatives(
    problem: &SlProblem,
    zero_tol: f64,
    opts: &SolverOptions,
) -> Result<(usize, Spectrum)> {
    if !(zero_tol > 0.0) {
        return Err(domain("zero_tol must be positive"));
    }
    let probe = assemble(problem, 4 * opts.start(problem))?;
    let mut want = probe.count_below(-0.5 * zero_tol) + 1;
    loop {
        let spec = eigenvalues_with(problem, want, zero_tol * 1e-2, opts)?;
        let mut negatives = 0;
        for (lam, est) in spec.eigenvalues.iter().zip(&spec.convergence_estimate) {
            if lam + est < -zero_tol {
                negatives += 1;
            } else if lam - est < -zero_tol {
                return Err(Error::Indeterminate {
                    eigenvalue: *lam,
                    estimate: *est,
                    zero_tol,
                });
            }
        }
        if negatives < want {
            return Ok((negatives, spec));
        }
        want = 2 * want + 1;
    }
}

/// `(negatives, zeros)` with every eigenvalue classified against the band
/// `[-zero_tol, zero_tol]`.
pub fn negative_count(problem: &SlProblem, zero_tol: f64) -> Result<(usize, usize)> {
    negative_count_with(problem, zero_tol, &SolverOptions::default())
}

pub fn negative_count_with(
    problem: &SlProblem,
    zero_tol: f64,
    opts: &SolverOptions,
) -> Result<(usize, usize)> {
    let opts = SolverOptions {
        with_vectors: false,
        ..*opts
    };
    let (negatives, _) = count_negatives(problem, zero_tol, &opts)?;
    let mut want = negatives + 2;
    loop {
        let spec = eigenvalues_with(problem, want, zero_tol * 1e-2, &opts)?;
        let mut zeros = 0;
        let mut positive_seen = false;
        for (lam, est) in spec
            .eigenvalues
            .iter()
            .zip(&spec.convergence_estimate)
            .skip(negatives)
        {
            match classify(*lam, *est, zero_tol)? {
                Sign::Zero => zeros += 1,
                Sign::Positive => positive_seen = true,
                Sign::Negative => {
                    return Err(Error::Consistency(
                        "negative eigenvalue out of order".into(),
                    ))
                }
            }
        }
        if positive_seen {
            return Ok((negatives, zeros));
        }
        if want > negatives + 64 {
            return Err(domain(
                "eigenvalues accumulate in the zero band; use count_negatives",
            ));
        }
        want *= 2;
    }
}

/// `Q[h] = ∫ |h'|² + ⟨A h, h⟩ - Σ_right c |h_c|² + Σ_left c |h_c|²` by the
/// trapezoid rule on the sample nodes.
pub fn quadratic_form(problem: &SlProblem, h: &SampledVector) -> f64 {
    let dim = problem.dimension.size();
    let n = h.t.len();
    let mut q = 0.0;
    for i in 0..n - 1 {
        let dt = h.t[i + 1] - h.t[i];
        for c in 0..dim {
            q += (h.h[i + 1][c] - h.h[i][c]).powi(2) / dt;
        }
        let fa = potential_form(problem, h.t[i], &h.h[i], dim);
        let fb = potential_form(problem, h.t[i + 1], &h.h[i + 1], dim);
        q += 0.5 * dt * (fa + fb);
    }
    for c in 0..dim {
        if let BoundaryCondition::Robin { coefficient } = problem.left[c] {
            q += coefficient * h.h[0][c].powi(2);
        }
        if let BoundaryCondition::Robin { coefficient } = problem.right[c] {
            q -= coefficient * h.h[n - 1][c].powi(2);
        }
    }
    q
}

fn potential_form(problem: &SlProblem, t: f64, v: &[f64; 2], dim: usize) -> f64 {
    let a = problem.potential_at(t);
    if dim == 1 {
        a[0][0] * v[0] * v[0]
    } else {
        a[0][0] * v[0] * v[0] + 2.0 * a[0][1] * v[0] * v[1] + a[1][1] * v[1] * v[1]
    }
}

/// `⟨w h, h⟩` by the trapezoid rule.
pub fn weighted_norm2(problem: &SlProblem, h: &SampledVector) -> f64 {
    let n = h.t.len();
    let f = |i: usize| problem.weight_at(h.t[i]) * (h.h[i][0].powi(2) + h.h[i][1].powi(2));
    (0..n - 1)
        .map(|i| 0.5 * (h.t[i + 1] - h.t[i]) * (f(i) + f(i + 1)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use std::f64::consts::PI;

    fn laplacian() -> SlProblem {
        SlProblem::scalar(0.0, PI, |_| 0.0, |_| 1.0)
    }

    #[test]
    fn textbook_dirichlet() {
        let s = eigenvalues(&laplacian(), 4, 1e-8).unwrap();
        for (j, lam) in s.eigenvalues.iter().enumerate() {
            let exact = ((j + 1) * (j + 1)) as f64;
            assert!((lam - exact).abs() < 1e-7, "{lam}");
        }
    }

    #[test]
    fn robin_dirichlet_matches_transcendental_roots() {
        // h'(0) = h(0), h(π) = 0: eigenvalue s² with tan(sπ) = -s
        let p = laplacian().with_left(BoundaryCondition::Robin { coefficient: 1.0 });
        let s = eigenvalues(&p, 3, 1e-9).unwrap();
        let g = |x: f64| (x * PI).sin() + x * (x * PI).cos();
        let mut roots = Vec::new();
        let mut a = 1e-3;
        while roots.len() < 3 {
            let b = a + 1e-3;
            if g(a) * g(b) < 0.0 {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if g(lo) * g(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            a = b;
        }
        for (lam, r) in s.eigenvalues.iter().zip(&roots) {
            assert!((lam - r * r).abs() < 1e-8, "{lam} vs {}", r * r);
        }
    }

    #[test]
    fn decoupled_vector_is_union_of_scalars() {
        let q1 = |t: f64| t.sin();
        let q2 = |t: f64| 2.0 - t;
        let v = SlProblem::vector(
            0.0,
            2.0,
            move |t| [[q1(t), 0.0], [0.0, q2(t)]],
            |t| 1.0 + t * t,
        );
        let a = eigenvalues(&SlProblem::scalar(0.0, 2.0, q1, |t| 1.0 + t * t), 4, 1e-9).unwrap();
        let b = eigenvalues(&SlProblem::scalar(0.0, 2.0, q2, |t| 1.0 + t * t), 4, 1e-9).unwrap();
        let mut union: Vec<f64> = a
            .eigenvalues
            .iter()
            .chain(&b.eigenvalues)
            .copied()
            .collect();
        union.sort_by(f64::total_cmp);
        let s = eigenvalues(&v, 4, 1e-9).unwrap();
        for (x, y) in s.eigenvalues.iter().zip(&union) {
            assert!((x - y).abs() < 1e-7);
        }
    }

    #[test]
    fn sturm_oscillation_count() {
        let p = SlProblem::scalar(0.0, 3.0, |t| 5.0 * (2.0 * t).cos(), |t| 1.0 + 0.5 * t);
        let s = eigenvalues(&p, 5, 1e-8).unwrap();
        for (i, v) in s.eigenvectors.iter().enumerate() {
            let inner = &v.h[1..v.h.len() - 1];
            let changes = inner.windows(2).filter(|w| w[0][0] * w[1][0] < 0.0).count();
            assert_eq!(changes, i);
        }
    }

    #[test]
    fn rayleigh_quotient_within_estimate() {
        let p = SlProblem::vector(
            -1.0,
            1.0,
            |t| [[t * t - 3.0, t], [t, 1.0 - t * t]],
            |t| 1.0 + 0.3 * t * t,
        )
        .with_left(BoundaryCondition::Robin { coefficient: -0.7 })
        .with_right(BoundaryCondition::Robin { coefficient: 0.7 });
        let s = eigenvalues(&p, 5, 1e-8).unwrap();
        for ((v, lam), est) in s
            .eigenvectors
            .iter()
            .zip(&s.eigenvalues)
            .zip(&s.convergence_estimate)
        {
            let rq = quadratic_form(&p, v) / weighted_norm2(&p, v);
            assert!((rq - lam).abs() < *est, "{rq} {lam} {est}");
        }
    }

    #[test]
    fn parity_union_reproduces_full_spectrum() {
        let p = SlProblem::vector(
            -1.0,
            1.0,
            |t| [[t * t - 3.0, t], [t, 1.0 - t * t]],
            |t| 1.0 + 0.3 * t * t,
        )
        .with_left(BoundaryCondition::Robin { coefficient: -0.7 })
        .with_right(BoundaryCondition::Robin { coefficient: 0.7 });
        let full = eigenvalues(&p, 6, 1e-9).unwrap();
        let plus = eigenvalues_parity(&p, Parity::Plus, 6, 1e-9).unwrap();
        let minus = eigenvalues_parity(&p, Parity::Minus, 6, 1e-9).unwrap();
        let mut union: Vec<f64> = plus
            .eigenvalues
            .iter()
            .chain(&minus.eigenvalues)
            .copied()
            .collect();
        union.sort_by(f64::total_cmp);
        for (x, y) in full.eigenvalues.iter().zip(&union) {
            assert!((x - y).abs() < 1e-7, "{x} {y}");
        }
        for (lam, par) in full.eigenvalues.iter().zip(&full.parity) {
            let expect = if plus.eigenvalues.iter().any(|v| (v - lam).abs() < 1e-6) {
                Parity::Plus
            } else {
                Parity::Minus
            };
            assert_eq!(*par, expect);
        }
    }

    #[test]
    fn asymmetric_potential_rejected_by_parity() {
        let p = SlProblem::vector(-1.0, 1.0, |t| [[t, 0.0], [0.0, 1.0]], |_| 1.0);
        assert!(eigenvalues_parity(&p, Parity::Plus, 2, 1e-8).is_err());
    }

    #[test]
    fn quadratic_form_vanishes_on_zero_mode() {
        // -h'' - h = 0 with h = sin t on [0, π]
        let p = SlProblem::scalar(0.0, PI, |_| -1.0, |_| 1.0);
        let n = 4000;
        let t: Vec<f64> = (0..=n).map(|i| PI * i as f64 / n as f64).collect();
        let h = t.iter().map(|x| [x.sin(), 0.0]).collect();
        let q = quadratic_form(&p, &SampledVector { t, h });
        assert!(q.abs() < 1e-6, "{q}");
    }

    #[test]
    fn negative_count_classifies() {
        // eigenvalues j² - 4 on [0, π]: -3, 0, 5, ...
        let p = SlProblem::scalar(0.0, PI, |_| -4.0, |_| 1.0);
        assert_eq!(negative_count(&p, 1e-4).unwrap(), (1, 1));
    }

    #[test]
    fn convergence_failure_reports_best() {
        let p = laplacian();
        let opts = SolverOptions {
            max_intervals: 256,
            ..SolverOptions::default()
        };
        match eigenvalues_with(&p, 2, 1e-14, &opts) {
            Err(crate::Error::Convergence { best, .. }) => assert_eq!(best.len(), 2),
            other => panic!("{other:?}"),
        }
    }
}
