//! Stability evidence for the exterior surfaces.

use rayon::prelude::*;
use serde::Serialize;

use super::problems::efs_problem;
use crate::error::{domain, Result};
use crate::geometry::{solve_neck_in, CoefficientSet, NeckData, Parametrization, SurfacePair};
use crate::sturm_liouville::{
    assemble, eigenvalues_with, oscillation_compare, shoot_scalar, ComparisonVerdict,
    ShootingResult, SolverOptions,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfsOptions {
    pub t_max: f64,
    /// Defaults to `ceil(2 sup|b|) + 2`.
    pub m_max: Option<u32>,
    /// Truncations below `t_max`; `t_max` is always appended.
    pub ladder: Vec<f64>,
    /// Required lower bound for the lowest unit-weight eigenvalue.
    pub margin: f64,
    /// Threshold applied to the lowest weighted eigenvalue (reported only).
    pub weighted_threshold: f64,
    /// Horizon of the scalar shooting problems, in the rescaled variable.
    pub shoot_horizon: f64,
    pub eigen_tol: f64,
}

impl Default for EfsOptions {
    fn default() -> Self {
        Self {
            t_max: 50.0,
            m_max: None,
            ladder: vec![2.0, 5.0, 10.0, 20.0],
            margin: 1e-4,
            weighted_threshold: 1e-4,
            shoot_horizon: 1e3,
            eigen_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RungCheck {
    pub m: u32,
    #[serde(rename = "T")]
    pub t: f64,
    /// Negative eigenvalues of the discrete pencil by inertia at 0.
    pub negatives: usize,
    pub inertia_grid: usize,
    /// Lowest eigenvalue with unit weight and its convergence estimate.
    pub unit_weight_lowest: f64,
    pub unit_weight_estimate: f64,
    /// Lowest eigenvalue with the geometric weight; absent where the
    /// weight overflows.
    pub weighted_lowest: Option<f64>,
    pub passes: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EfsVerdict {
    StableEvidence,
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfsReport {
    pub pair: SurfacePair,
    pub p: f64,
    #[serde(rename = "T_p")]
    pub t_p: f64,
    pub m_max: u32,
    pub sup_abs_b: f64,
    pub rungs: Vec<RungCheck>,
    pub direct_passes: bool,
    pub lowest_unit_weight: f64,
    /// Smallest weighted eigenvalue found, and whether every computed one
    /// clears `weighted_threshold`.
    pub lowest_weighted: Option<f64>,
    pub weighted_threshold_met: bool,
    pub scalar: ShootingResult,
    pub comparison: ComparisonVerdict,
    pub verdict: EfsVerdict,
    pub failures: Vec<String>,
}

pub fn efs_stability(pair: SurfacePair) -> Result<EfsReport> {
    efs_stability_with(pair, &EfsOptions::default())
}

/// Three certificates: (a) positivity of the truncated problem for all
/// modes up to `m_max` on a ladder of truncations, (b) survival of the
/// rescaled scalar problem, (c) comparison with the auxiliary problem.
pub fn efs_stability_with(pair: SurfacePair, opts: &EfsOptions) -> Result<EfsReport> {
    let neck = solve_neck_in(pair, Parametrization::Rational, 1e-12)?;
    if !(opts.t_max > neck.t) {
        return Err(domain(format!(
            "t_max {} must exceed T_p = {}",
            opts.t_max, neck.t
        )));
    }
    let coeffs = CoefficientSet::new(&neck);
    let sup_b = coeffs.sup_abs_b(neck.t);
    let m_max = opts.m_max.unwrap_or((2.0 * sup_b).ceil() as u32 + 2);
    let mut ladder: Vec<f64> = opts
        .ladder
        .iter()
        .copied()
        .filter(|&t| t > neck.t + 0.5 && t < opts.t_max)
        .collect();
    ladder.push(opts.t_max);
    let jobs: Vec<(u32, f64)> = (0..=m_max)
        .flat_map(|m| ladder.iter().map(move |&t| (m, t)))
        .collect();
    let rungs = jobs
        .par_iter()
        .map(|&(m, t)| rung(&neck, m, t, opts))
        .collect::<Result<Vec<_>>>()?;
    let direct_passes = rungs.iter().all(|r| r.passes);
    let lowest_unit_weight = rungs
        .iter()
        .map(|r| r.unit_weight_lowest)
        .fold(f64::INFINITY, f64::min);
    let lowest_weighted = rungs
        .iter()
        .filter_map(|r| r.weighted_lowest)
        .reduce(f64::min);
    let weighted_threshold_met = rungs.iter().all(|r| {
        r.weighted_lowest
            .is_some_and(|v| v > opts.weighted_threshold)
    });

    let tp = neck.t;
    let nscal = move |s: f64| {
        let a = coeffs.a(tp * s);
        2.0 * tp * tp * a * a
    };
    let aux = |s: f64| 2.0 / 9.0 / (s - 2.0 / 3.0).powi(2);
    let start = tp * neck.rho_t;
    let scalar = shoot_scalar(&nscal, 1.0, start, opts.shoot_horizon)?;
    let comparison = oscillation_compare(&aux, &nscal, 1.0, start, 1.0, opts.shoot_horizon)?;

    let mut failures = Vec::new();
    for r in rungs.iter().filter(|r| !r.passes) {
        failures.push(format!(
            "direct: m = {}, T = {}: {} negatives, unit-weight lowest {:e}",
            r.m, r.t, r.negatives, r.unit_weight_lowest
        ));
    }
    if let Some(z) = scalar.first_zero {
        failures.push(format!("scalar: solution vanishes at t = {z}"));
    }
    if !comparison.second.survived() || !comparison.consistent {
        failures.push("comparison: rescaled problem does not survive".into());
    }
    let verdict = if failures.is_empty() {
        EfsVerdict::StableEvidence
    } else {
        EfsVerdict::Counterexample
    };
    Ok(EfsReport {
        pair,
        p: pair.p(),
        t_p: neck.t,
        m_max,
        sup_abs_b: sup_b,
        rungs,
        direct_passes,
        lowest_unit_weight,
        lowest_weighted,
        weighted_threshold_met,
        scalar,
        comparison,
        verdict,
        failures,
    })
}

fn rung(neck: &NeckData, m: u32, t: f64, opts: &EfsOptions) -> Result<RungCheck> {
    let problem = efs_problem(neck, m, t);
    let unit = problem.unit_weight();
    let solver = SolverOptions {
        with_vectors: false,
        max_initial_step: 0.01,
        ..SolverOptions::default()
    };
    let spec = eigenvalues_with(&unit, 1, opts.eigen_tol, &solver)?;
    // inertia of K does not depend on the weight
    let pencil = assemble(&unit, spec.grid_size)?;
    let negatives = pencil.count_below(0.0);
    let (lowest, est) = (spec.eigenvalues[0], spec.convergence_estimate[0]);
    let coeffs = CoefficientSet::new(neck);
    let weighted_lowest = if coeffs.ln_rho2(t) < 600.0 {
        Some(eigenvalues_with(&problem, 1, opts.eigen_tol * 1e-3, &solver)?.eigenvalues[0])
    } else {
        None
    };
    Ok(RungCheck {
        m,
        t,
        negatives,
        inertia_grid: spec.grid_size,
        unit_weight_lowest: lowest,
        unit_weight_estimate: est,
        weighted_lowest,
        passes: negatives == 0 && lowest - est > opts.margin,
    })
}
