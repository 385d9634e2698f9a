//! One function per subcommand: run the computation, build the envelope
//! and its CSV projection.

use anyhow::Result;
use fsmorse::geometry::{total_curvature, SurfaceKind, SurfacePair};
use fsmorse::index::{
    efs_stability_with, fs_index_closed_form, fs_index_with, ifs_index_bounds, ifs_table_with,
    topological_bounds_for, EfsVerdict, IfsBounds, IndexMode, TopologicalBounds,
};
use fsmorse::inequality::{
    verify_aux_bound, verify_case1, verify_case2, verify_f_second_derivative_bound, verify_fineq,
    verify_ptp_bounds, PtpReport, VerificationReport,
};
use fsmorse::steklov::{
    index_upper_bound, spectral_index, steklov_spectrum, Family, SteklovSpectrum,
};
use serde::Serialize;

use crate::config::{CommandConfig, RunConfig};
use crate::output::{fmt_opt, fmt_value, Outcome, Table};
use crate::selftest;

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match &cfg.command {
        CommandConfig::FsIndex {
            pair,
            mode,
            options,
        } => {
            let mode = if *mode == "closed-form" {
                IndexMode::ClosedForm
            } else {
                IndexMode::Numeric
            };
            let report = fs_index_with(*pair, mode, options)?;
            let passed = report
                .nullity_evidence
                .is_none_or(|n| n == report.nullity_closed_form);
            let mut table = Table::new([
                "m",
                "negatives_plus",
                "negatives_minus",
                "multiplicity",
                "contribution",
                "first_nonnegative_plus",
                "first_nonnegative_minus",
            ]);
            for c in &report.per_mode {
                table.push(vec![
                    c.m.to_string(),
                    c.negatives_plus.to_string(),
                    c.negatives_minus.to_string(),
                    c.multiplicity.to_string(),
                    c.contribution.to_string(),
                    c.first_nonnegative[0].to_string(),
                    c.first_nonnegative[1].to_string(),
                ]);
            }
            Outcome::new(cfg, passed, &report, table)
        }
        CommandConfig::IfsTable {
            pair,
            m_max,
            i_max,
            zero_tol,
            tol,
            digits,
        } => {
            let t = ifs_table_with(*pair, *m_max, *i_max, *zero_tol, *tol)?;
            let mut header = vec!["m".to_string()];
            header.extend((1..=*i_max).map(|i| format!("lambda_{i}")));
            header.push("zeros".into());
            let mut table = Table::new(header);
            for row in &t.rows {
                let mut cells = vec![row.m.to_string()];
                cells.extend(row.eigenvalues.iter().map(|&v| fmt_value(v, *digits)));
                let zeros: Vec<String> = row
                    .zero
                    .iter()
                    .enumerate()
                    .filter(|(_, z)| **z)
                    .map(|(i, _)| (i + 1).to_string())
                    .collect();
                cells.push(zeros.join(";"));
                table.push(cells);
            }
            Outcome::new(cfg, true, &t, table)
        }
        CommandConfig::EfsStability { pair, options } => {
            let r = efs_stability_with(*pair, options)?;
            let passed = r.verdict == EfsVerdict::StableEvidence;
            let mut table = Table::new([
                "m",
                "T",
                "negatives",
                "inertia_grid",
                "unit_weight_lowest",
                "unit_weight_estimate",
                "weighted_lowest",
                "passes",
            ]);
            for c in &r.rungs {
                table.push(vec![
                    c.m.to_string(),
                    c.t.to_string(),
                    c.negatives.to_string(),
                    c.inertia_grid.to_string(),
                    c.unit_weight_lowest.to_string(),
                    c.unit_weight_estimate.to_string(),
                    fmt_opt(c.weighted_lowest),
                    c.passes.to_string(),
                ]);
            }
            Outcome::new(cfg, passed, &r, table)
        }
        CommandConfig::Steklov { pair, m_max } => steklov(cfg, *pair, *m_max),
        CommandConfig::VerifyInequalities {
            b_max,
            step,
            t_max,
            p_list,
        } => inequalities(cfg, *b_max, *step, *t_max, p_list),
        CommandConfig::Bounds { pair, numeric } => bounds(cfg, *pair, *numeric),
        CommandConfig::Selftest => {
            let r = selftest::run();
            let passed = r.iter().all(|c| c.passed);
            let mut table = Table::new(["check", "passed", "detail"]);
            for c in &r {
                table.push(vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]);
            }
            Outcome::new(cfg, passed, &r, table)
        }
    }
}

#[derive(Serialize)]
struct SteklovReport {
    spectrum: SteklovSpectrum,
    spectral_index: i64,
    index_upper_bound: i64,
}

fn steklov(cfg: &RunConfig, pair: SurfacePair, m_max: u32) -> Result<Outcome> {
    let report = SteklovReport {
        spectrum: steklov_spectrum(pair, m_max)?,
        spectral_index: spectral_index(pair, IndexMode::Numeric)?,
        index_upper_bound: index_upper_bound(pair)?,
    };
    let mut table = Table::new(["family", "m", "value", "multiplicity", "parity_admissible"]);
    for e in &report.spectrum.entries {
        let family = match e.family {
            Family::Lambda => "lambda",
            Family::Mu => "mu",
        };
        table.push(vec![
            family.into(),
            e.m.to_string(),
            e.value.to_string(),
            e.multiplicity.to_string(),
            e.parity_admissible.to_string(),
        ]);
    }
    Outcome::new(cfg, true, &report, table)
}

#[derive(Serialize)]
struct InequalityReport {
    reports: Vec<VerificationReport>,
    ptp: PtpReport,
}

fn inequalities(
    cfg: &RunConfig,
    b_max: f64,
    step: f64,
    t_max: f64,
    p_list: &[SurfacePair],
) -> Result<Outcome> {
    let mut reports = vec![
        verify_fineq(b_max, step)?,
        verify_case1(b_max, step)?,
        verify_f_second_derivative_bound(step)?,
        verify_case2(b_max, step)?,
    ];
    reports.extend(verify_aux_bound(p_list, t_max, step)?);
    let report = InequalityReport {
        ptp: verify_ptp_bounds(p_list)?,
        reports,
    };
    let passed = report.ptp.all_hold && report.reports.iter().all(|r| r.verdict.holds());
    let mut table = Table::new([
        "name",
        "cells",
        "grid_step",
        "worst_margin",
        "lipschitz_bound",
        "verdict",
    ]);
    for r in &report.reports {
        let verdict = serde_json::to_value(&r.verdict)?;
        table.push(vec![
            r.name.clone(),
            r.cells.to_string(),
            r.grid_step.to_string(),
            r.worst_margin.to_string(),
            r.lipschitz_bound.to_string(),
            verdict["status"].as_str().unwrap_or_default().to_string(),
        ]);
    }
    Outcome::new(cfg, passed, &report, table)
}

#[derive(Serialize)]
struct BoundsReport {
    fs_index_closed_form: i64,
    fs_total_curvature: f64,
    ifs: IfsBounds,
    efs: TopologicalBounds,
}

fn bounds(cfg: &RunConfig, pair: SurfacePair, numeric: bool) -> Result<Outcome> {
    let report = BoundsReport {
        fs_index_closed_form: fs_index_closed_form(pair),
        fs_total_curvature: total_curvature(pair, SurfaceKind::Fs),
        ifs: ifs_index_bounds(pair, numeric)?,
        efs: topological_bounds_for(pair),
    };
    let passed = report.ifs.lower <= report.ifs.upper;
    let mut table = Table::new(["quantity", "value"]);
    let rows: [(&str, String); 8] = [
        (
            "fs_index_closed_form",
            report.fs_index_closed_form.to_string(),
        ),
        ("fs_total_curvature", report.fs_total_curvature.to_string()),
        ("ifs_lower", report.ifs.lower.to_string()),
        ("ifs_upper", report.ifs.upper.to_string()),
        (
            "ifs_conjectured_cover_lower",
            report.ifs.conjectured_cover_lower.to_string(),
        ),
        (
            "ifs_numeric_cover_count",
            report
                .ifs
                .numeric_cover_count
                .map(|n| n.to_string())
                .unwrap_or_default(),
        ),
        (
            "efs_riemann_roch_clamped",
            report.efs.riemann_roch_clamped.to_string(),
        ),
        (
            "efs_ejiri_micallef_clamped",
            report.efs.ejiri_micallef_clamped.to_string(),
        ),
    ];
    for (k, v) in rows {
        table.push(vec![k.into(), v]);
    }
    Outcome::new(cfg, passed, &report, table)
}
