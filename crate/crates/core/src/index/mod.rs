//! Morse index and nullity of the complete, exterior and interior surfaces.

mod bounds;
mod efs;
mod ifs;
mod problems;

pub use bounds::{topological_bounds, topological_bounds_for, TopologicalBounds};
pub use efs::{efs_stability, efs_stability_with, EfsOptions, EfsReport, EfsVerdict, RungCheck};
pub use ifs::{
    conjectured_cover_lower, ifs_conjecture_observation, ifs_index_bounds, ifs_killing_residuals,
    ifs_killing_residuals_with, ifs_table, ifs_table_with, ifs_upper_closed_form, killing_field,
    numeric_cover_count, split_check, ConjectureObservation, EigRow, EigTable, IfsBounds,
    KillingResidual, SplitReport, DEFAULT_ZERO_TOL, KILLING_INTERVALS, REFERENCE_7_3,
};
pub use problems::{efs_problem, fs_problem, ifs_problem};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::geometry::{
    frame, jacobi_apply, solve_neck, CoefficientSet, GridSpec, SectionGrid, SurfaceKind,
    SurfacePair,
};
use crate::sturm_liouville::{count_negatives, half_problem, Parity, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexMode {
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentParity {
    Even,
    Odd,
}

/// `Ind(FS)`: `2k - 1` for odd `k`, `k - 1` for even `k`.
pub fn fs_index_closed_form(pair: SurfacePair) -> i64 {
    let k = i64::from(pair.k());
    if pair.k_is_even() {
        k - 1
    } else {
        2 * k - 1
    }
}

/// Whether a cover eigensection of mode `m ≥ 1` whose first component has
/// parity `h1` descends to the non-orientable quotient (`k` even).
pub fn descent_filter(m: u32, h1: ComponentParity, k: u32) -> Result<bool> {
    if k % 2 == 1 {
        return Err(domain("descent only applies for even k"));
    }
    if m == 0 {
        return Err(domain("m = 0 is handled separately"));
    }
    Ok(m.is_multiple_of(2) == (h1 == ComponentParity::Even))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeCount {
    pub m: u32,
    /// Negatives with `h1` even.
    pub negatives_plus: usize,
    /// Negatives with `h1` odd.
    pub negatives_minus: usize,
    /// Zero modes are not counted for the complete surface, where the
    /// truncated spectrum accumulates at 0.
    pub zeros: Option<usize>,
    /// Lowest non-negative eigenvalue of each family at the final truncation.
    pub first_nonnegative: [f64; 2],
    /// Multiplicity of each eigenvalue on the surface (1 for `m = 0`).
    pub multiplicity: usize,
    /// Contribution to the index of the surface named in the report.
    pub contribution: usize,
}

impl ModeCount {
    pub fn negatives(&self) -> usize {
        self.negatives_plus + self.negatives_minus
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelledBound {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexSettings {
    /// Truncations visited, the last being the one reported.
    pub truncations: Vec<f64>,
    pub zero_tol: f64,
    pub eigen_tol: f64,
    pub finest_grid: usize,
    pub nullity_grid: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub pair: SurfacePair,
    pub kind: SurfaceKind,
    pub index_numeric: Option<i64>,
    pub index_closed_form: Option<i64>,
    /// Numeric index of the orientable cover, before descent.
    pub cover_index_numeric: Option<i64>,
    pub nullity_evidence: Option<usize>,
    pub nullity_closed_form: usize,
    pub per_mode: Vec<ModeCount>,
    pub bounds: Vec<LabelledBound>,
    pub settings: Option<IndexSettings>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FsOptions {
    pub truncations: Vec<f64>,
    pub zero_tol: f64,
    pub solver: SolverOptions,
    /// Skip the Jacobi-field nullity check.
    pub skip_nullity: bool,
    pub nullity_grid: [usize; 2],
}

impl Default for FsOptions {
    fn default() -> Self {
        Self {
            truncations: vec![2.0, 4.0, 8.0, 16.0],
            zero_tol: 1e-4,
            solver: SolverOptions {
                with_vectors: false,
                ..SolverOptions::default()
            },
            skip_nullity: false,
            nullity_grid: [512, 256],
        }
    }
}

pub fn fs_index(pair: SurfacePair, mode: IndexMode) -> Result<IndexReport> {
    fs_index_with(pair, mode, &FsOptions::default())
}

/// Index of the complete surface. The numeric path counts negative
/// eigenvalues of the cover per mode and parity, doubling the truncation
/// until the counts agree over two doublings, then applies descent for even
/// `k`. A mismatch with the closed form is a `Verification` error.
pub fn fs_index_with(pair: SurfacePair, mode: IndexMode, opts: &FsOptions) -> Result<IndexReport> {
    let closed = fs_index_closed_form(pair);
    let mut report = IndexReport {
        pair,
        kind: SurfaceKind::Fs,
        index_numeric: None,
        index_closed_form: Some(closed),
        cover_index_numeric: None,
        nullity_evidence: None,
        nullity_closed_form: 4,
        per_mode: Vec::new(),
        bounds: fs_bounds(pair),
        settings: None,
    };
    if mode == IndexMode::ClosedForm {
        return Ok(report);
    }
    let (per_mode, settings) = fs_mode_counts(pair, opts)?;
    let cover: usize = per_mode
        .iter()
        .map(|c| c.multiplicity * c.negatives())
        .sum();
    let surface: usize = per_mode.iter().map(|c| c.contribution).sum();
    report.cover_index_numeric = Some(cover as i64);
    report.index_numeric = Some(surface as i64);
    report.per_mode = per_mode;
    let mut settings = settings;
    if !opts.skip_nullity {
        let ev = fs_nullity_evidence_with(pair, opts.nullity_grid[0], opts.nullity_grid[1])?;
        report.nullity_evidence = Some(ev.count);
        settings.nullity_grid = Some(opts.nullity_grid);
    }
    report.settings = Some(settings);
    if surface as i64 != closed {
        return Err(Error::Verification {
            what: format!("index of FS{pair}"),
            closed,
            numeric: surface as i64,
        });
    }
    Ok(report)
}

fn fs_bounds(pair: SurfacePair) -> Vec<LabelledBound> {
    let k = f64::from(pair.k());
    vec![
        LabelledBound {
            label: "cover index 2k-1".into(),
            value: 2.0 * k - 1.0,
        },
        LabelledBound {
            label: "total curvature".into(),
            value: crate::geometry::total_curvature(pair, SurfaceKind::Fs),
        },
    ]
}

type FamilyCount = (usize, f64, usize);

fn family_count(
    pair: SurfacePair,
    m: u32,
    parity: Parity,
    t: f64,
    opts: &FsOptions,
) -> Result<FamilyCount> {
    let neck = solve_neck(pair.k(), pair.l(), 1e-12)?;
    let p = fs_problem(CoefficientSet::new(&neck), m, t);
    let half = half_problem(&p, parity)?;
    let (n, spec) = count_negatives(&half, opts.zero_tol, &opts.solver)?;
    let next = spec.eigenvalues.get(n).copied().unwrap_or(f64::INFINITY);
    Ok((n, next, spec.grid_size))
}

fn fs_mode_counts(pair: SurfacePair, opts: &FsOptions) -> Result<(Vec<ModeCount>, IndexSettings)> {
    if opts.truncations.len() < 3 {
        return Err(domain("need at least three truncations"));
    }
    let modes: Vec<(u32, Parity)> = (0..=pair.k() + 1)
        .flat_map(|m| [(m, Parity::Plus), (m, Parity::Minus)])
        .collect();
    let mut history: Vec<Vec<FamilyCount>> = Vec::new();
    let mut visited = Vec::new();
    for &t in &opts.truncations {
        let row = modes
            .par_iter()
            .map(|&(m, par)| family_count(pair, m, par, t, opts))
            .collect::<Result<Vec<_>>>()?;
        history.push(row);
        visited.push(t);
        let h = history.len();
        if h >= 3 {
            let tol = opts.zero_tol / 10.0;
            let same = |a: &[FamilyCount], b: &[FamilyCount]| {
                a.iter()
                    .zip(b)
                    .all(|(x, y)| x.0 == y.0 && !((x.1 - y.1).abs() >= tol))
            };
            if same(&history[h - 1], &history[h - 2]) && same(&history[h - 2], &history[h - 3]) {
                break;
            }
        }
    }
    let h = history.len();
    if h < 3
        || !history[h - 1]
            .iter()
            .zip(&history[h - 2])
            .all(|(x, y)| x.0 == y.0)
    {
        return Err(Error::Consistency(format!(
            "negative counts for FS{pair} did not stabilise over the truncations {visited:?}"
        )));
    }
    let last = &history[h - 1];
    let even = pair.k_is_even();
    let per_mode = (0..=pair.k() + 1)
        .map(|m| {
            let (plus, minus) = (&last[2 * m as usize], &last[2 * m as usize + 1]);
            let multiplicity = if m == 0 { 1 } else { 2 };
            let contribution = if !even {
                multiplicity * (plus.0 + minus.0)
            } else if m == 0 {
                plus.0
            } else {
                // the chosen parity family descends with multiplicity 2
                let plus_ok = m % 2 == 0;
                2 * if plus_ok { plus.0 } else { minus.0 }
            };
            ModeCount {
                m,
                negatives_plus: plus.0,
                negatives_minus: minus.0,
                zeros: None,
                first_nonnegative: [plus.1, minus.1],
                multiplicity,
                contribution,
            }
        })
        .collect();
    let settings = IndexSettings {
        truncations: visited,
        zero_tol: opts.zero_tol,
        eigen_tol: opts.zero_tol * 1e-2,
        finest_grid: last.iter().map(|x| x.2).max().unwrap_or(0),
        nullity_grid: None,
    };
    Ok((per_mode, settings))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldResidual {
    /// Coordinate direction `i` of `(∂_i)^⊥`, 1-based.
    pub direction: usize,
    /// Max-norm residuals on the base grid and two refinements.
    pub raw: [f64; 3],
    /// `raw[0] / raw[1]`, near 4 for a second-order residual.
    pub ratio: f64,
    /// Max of the pointwise three-level extrapolation on the base grid.
    pub extrapolated: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullityEvidence {
    pub count: usize,
    pub fields: Vec<FieldResidual>,
    pub grid: [usize; 2],
}

pub const NULLITY_TOL: f64 = 1e-6;

pub fn fs_nullity_evidence(pair: SurfacePair) -> Result<NullityEvidence> {
    fs_nullity_evidence_with(pair, 512, 256)
}

/// Applies the discrete Jacobi operator to the projections of the four
/// coordinate fields on `[-1, 1] × S¹`, at three nested grids. A field is
/// certified when the extrapolated residual is below `NULLITY_TOL` and the
/// raw residual falls at second order.
pub fn fs_nullity_evidence_with(
    pair: SurfacePair,
    nt: usize,
    ntheta: usize,
) -> Result<NullityEvidence> {
    let neck = solve_neck(pair.k(), pair.l(), 1e-12)?;
    let base = GridSpec::new(-1.0, 1.0, nt + 1, ntheta);
    let specs = [base, base.refined(), base.refined().refined()];
    let fields = (0..4)
        .into_par_iter()
        .map(|dir| {
            let outs = specs
                .iter()
                .map(|&s| {
                    let sec = SectionGrid::from_fn(s, |t, th| {
                        let f = frame(&neck, t, th);
                        [f.n1[dir], f.n2[dir]]
                    });
                    jacobi_apply(&neck, &sec)
                })
                .collect::<Result<Vec<_>>>()?;
            let raw = [outs[0].max_abs(), outs[1].max_abs(), outs[2].max_abs()];
            let mut extrapolated = 0.0f64;
            for i in 0..outs[0].spec.nt {
                for j in 0..ntheta {
                    // output row i sits at input row i + 1
                    let r0 = outs[0].at(i, j);
                    let r1 = outs[1].at(2 * i + 1, 2 * j);
                    let r2 = outs[2].at(4 * i + 3, 4 * j);
                    for c in 0..2 {
                        let e = (64.0 * r2[c] - 20.0 * r1[c] + r0[c]) / 45.0;
                        extrapolated = extrapolated.max(e.abs());
                    }
                }
            }
            let ratio = raw[0] / raw[1];
            Ok(FieldResidual {
                direction: dir + 1,
                raw,
                ratio,
                extrapolated,
                certified: extrapolated < NULLITY_TOL && (3.2..=4.8).contains(&ratio),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NullityEvidence {
        count: fields.iter().filter(|f| f.certified).count(),
        fields,
        grid: [nt, ntheta],
    })
}

/// `Q_{m,∞}[ĥ]` for `ĥ = (cosh lt, sinh lt)/sqrt(cosh((k+l)t) cosh((k-l)t))`,
/// by composite Simpson on a symmetric interval, doubled to convergence.
pub fn fs_qhat(pair: SurfacePair, m: u32) -> Result<f64> {
    let neck = solve_neck(pair.k(), pair.l(), 1e-12)?;
    let c = CoefficientSet::new(&neck);
    let (k, l) = (c.k(), c.l());
    let mf = f64::from(m);
    let integrand = |t: f64| {
        let [_, _, shl, chl] = crate::geometry::scaled_hyperbolics(k, l, t);
        let g = 0.5 * ((k + l) * ((k + l) * t).tanh() + (k - l) * ((k - l) * t).tanh());
        let (h1, h2) = (chl, shl);
        let (d1, d2) = (l * shl - g * chl, l * chl - g * shl);
        let a = c.potential(mf, t);
        d1 * d1 + d2 * d2 + a[0][0] * h1 * h1 + 2.0 * a[0][1] * h1 * h2 + a[1][1] * h2 * h2
    };
    // ĥ decays like e^{-(k-l)|t|}
    let span = 40.0 / (k - l);
    let simpson = |n: usize| {
        let h = 2.0 * span / n as f64;
        let mut s = integrand(-span) + integrand(span);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * integrand(-span + h * i as f64);
        }
        s * h / 3.0
    };
    let mut n = 1024;
    let mut prev = simpson(n);
    while n < 1 << 22 {
        n *= 2;
        let cur = simpson(n);
        if (cur - prev).abs() < 1e-13 * (1.0 + cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Convergence {
        max_intervals: n,
        best: vec![prev],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(k: u32, l: u32) -> SurfacePair {
        SurfacePair::new(k, l).unwrap()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(fs_index_closed_form(pair(2, 1)), 1);
        assert_eq!(fs_index_closed_form(pair(7, 3)), 13);
        assert_eq!(fs_index_closed_form(pair(4, 1)), 3);
    }

    #[test]
    fn descent_rule() {
        assert!(descent_filter(2, ComponentParity::Even, 4).unwrap());
        assert!(!descent_filter(1, ComponentParity::Even, 4).unwrap());
        assert!(descent_filter(1, ComponentParity::Odd, 2).unwrap());
        assert!(descent_filter(1, ComponentParity::Odd, 3).is_err());
        assert!(descent_filter(0, ComponentParity::Even, 2).is_err());
    }

    #[test]
    fn qhat_signs() {
        for (k, l) in [(2, 1), (3, 1), (5, 2), (7, 3)] {
            let p = pair(k, l);
            for m in 0..k {
                assert!(fs_qhat(p, m).unwrap() < -1e-3, "({k},{l}) m={m}");
            }
            assert!(fs_qhat(p, k).unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn qhat_low_modes_can_be_positive() {
        // the pointwise root of B(m, t) is 2 b tanh(2lt), which exceeds k
        // for (3, 2) and (4, 3)
        assert!(fs_qhat(pair(3, 2), 0).unwrap() > 0.5);
        assert!(fs_qhat(pair(4, 3), 1).unwrap() > 0.5);
        assert!(fs_qhat(pair(4, 3), 2).unwrap() < -1.0);
    }

    #[test]
    fn numeric_index_small_pair() {
        let opts = FsOptions {
            skip_nullity: true,
            ..FsOptions::default()
        };
        let r = fs_index_with(pair(2, 1), IndexMode::Numeric, &opts).unwrap();
        assert_eq!(r.index_numeric, Some(1));
        assert_eq!(r.cover_index_numeric, Some(3));
    }

    #[test]
    fn nullity_small_grid() {
        let ev = fs_nullity_evidence_with(pair(2, 1), 128, 64).unwrap();
        for f in &ev.fields {
            assert!((3.2..4.8).contains(&f.ratio), "{f:?}");
        }
    }
}
