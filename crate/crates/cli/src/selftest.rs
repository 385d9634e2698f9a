//! Quick subset of the acceptance checks, well under a minute on one core.

use fsmorse::geometry::SurfacePair;
use fsmorse::index::{
    efs_stability, fs_index, fs_qhat, ifs_table, split_check, EfsVerdict, IndexMode, REFERENCE_7_3,
};
use fsmorse::inequality::{
    verify_aux_bound, verify_case1, verify_case2, verify_f_second_derivative_bound, verify_fineq,
};
use fsmorse::steklov::{index_upper_bound, spectral_index, spectral_index_closed_form};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct SelfCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, f: impl FnOnce() -> fsmorse::Result<(bool, String)>) -> SelfCheck {
    let (passed, detail) = f().unwrap_or_else(|e| (false, e.to_string()));
    SelfCheck {
        name: name.into(),
        passed,
        detail,
    }
}

fn pair(k: u32, l: u32) -> SurfacePair {
    SurfacePair::new(k, l).expect("fixed pair")
}

fn coprime_pairs(k_max: u32) -> impl Iterator<Item = SurfacePair> {
    (2..=k_max).flat_map(|k| (1..k).filter_map(move |l| SurfacePair::new(k, l).ok()))
}

pub fn run() -> Vec<SelfCheck> {
    vec![
        check("ifs-table-7-3", || {
            let t = ifs_table(pair(7, 3), 12, 5)?;
            let mut worst: f64 = 0.0;
            for (m, row) in REFERENCE_7_3.iter().enumerate() {
                for (i, v) in row.iter().enumerate() {
                    let got = t.entry(m as u32, i + 1).unwrap_or(f64::NAN);
                    worst = worst.max((got - v).abs());
                }
            }
            let zeros = [(4usize, 0u32), (3, 4), (2, 10)]
                .iter()
                .all(|&(i, m)| t.entry(m, i).is_some_and(|v| v.abs() < 1e-3));
            Ok((worst < 0.01 && zeros, format!("max deviation {worst:.2e}")))
        }),
        check("fs-index-2-1", || {
            let r = fs_index(pair(2, 1), IndexMode::Numeric)?;
            let ok = r.index_numeric == Some(1) && r.nullity_evidence == Some(4);
            Ok((
                ok,
                format!(
                    "index {:?}, nullity {:?}",
                    r.index_numeric, r.nullity_evidence
                ),
            ))
        }),
        check("qhat-2-1", || {
            let q: Vec<f64> = (0..=2)
                .map(|m| fs_qhat(pair(2, 1), m))
                .collect::<fsmorse::Result<_>>()?;
            let ok = q[0] < -1e-3 && q[1] < -1e-3 && q[2].abs() < 1e-6;
            Ok((ok, format!("{q:?}")))
        }),
        check("steklov-k-le-12", || {
            let mut n = 0;
            for p in coprime_pairs(12) {
                if spectral_index(p, IndexMode::Numeric)? != spectral_index_closed_form(p) {
                    return Ok((false, format!("mismatch at {p}")));
                }
                index_upper_bound(p)?;
                n += 1;
            }
            Ok((index_upper_bound(pair(2, 1))? == 5, format!("{n} pairs")))
        }),
        check("efs-p-2", || {
            let r = efs_stability(pair(2, 1))?;
            Ok((
                r.verdict == EfsVerdict::StableEvidence,
                format!("lowest unit-weight eigenvalue {:.3e}", r.lowest_unit_weight),
            ))
        }),
        check("inequalities", || {
            let mut reports = vec![
                verify_fineq(50.0, 1e-3)?,
                verify_case1(50.0, 1e-3)?,
                verify_f_second_derivative_bound(1e-3)?,
                verify_case2(50.0, 1e-3)?,
            ];
            let ps = [pair(3, 2), pair(2, 1), pair(3, 1), pair(10, 1)];
            reports.extend(verify_aux_bound(&ps, 100.0, 1e-3)?);
            let worst = reports
                .iter()
                .map(|r| r.worst_margin)
                .fold(f64::INFINITY, f64::min);
            Ok((
                reports.iter().all(|r| r.verdict.holds()),
                format!("{} reports, worst margin {worst:.3e}", reports.len()),
            ))
        }),
        check("split-2-1", || {
            let s = split_check(pair(2, 1))?;
            Ok((
                s.holds,
                format!("interior cover {}", s.interior_cover_numeric),
            ))
        }),
    ]
}
