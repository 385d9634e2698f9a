//! Interior surfaces: eigenvalue table, rotational zero modes, bounds.

use rayon::prelude::*;
use serde::Serialize;

use super::fs_index_closed_form;
use super::problems::ifs_problem;
use crate::error::{Error, Result};
use crate::geometry::{solve_neck, CoefficientSet, NeckData, SurfacePair};
use crate::sturm_liouville::{eigenvalues, SlProblem};

pub const DEFAULT_ZERO_TOL: f64 = 1e-4;

/// Published `λ_i(m)` for `(7,3)`, rows `m = 0..=12`, columns `i = 1..=5`,
/// rounded to three decimals.
pub const REFERENCE_7_3: [[f64; 5]; 13] = [
    [-5.443, -2.415, -1.512, 0.000, 10.780],
    [-5.393, -2.441, -1.387, 0.055, 10.850],
    [-5.242, -2.473, -1.060, 0.220, 11.060],
    [-4.995, -2.453, -0.589, 0.497, 11.410],
    [-4.654, -2.358, 0.000, 0.887, 11.910],
    [-4.226, -2.179, 0.694, 1.390, 12.550],
    [-3.717, -1.914, 1.488, 2.010, 13.350],
    [-3.132, -1.562, 2.376, 2.744, 14.300],
    [-2.477, -1.125, 3.355, 3.593, 15.400],
    [-1.757, -0.603, 4.419, 4.553, 16.670],
    [-0.976, 0.000, 5.567, 5.620, 18.110],
    [-0.136, 0.684, 6.788, 6.793, 19.710],
    [0.763, 1.447, 8.051, 8.095, 21.500],
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigRow {
    pub m: u32,
    pub eigenvalues: Vec<f64>,
    pub zero: Vec<bool>,
    pub convergence_estimate: Vec<f64>,
    pub grid_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigTable {
    pub pair: SurfacePair,
    #[serde(rename = "T")]
    pub t: f64,
    pub zero_tol: f64,
    pub tol: f64,
    pub rows: Vec<EigRow>,
}

impl EigTable {
    pub fn entry(&self, m: u32, i: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.m == m)
            .and_then(|r| r.eigenvalues.get(i - 1).copied())
    }

    /// `(i, m)` cells flagged as zero, 1-based `i`.
    pub fn zero_cells(&self) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for row in &self.rows {
            for (i, z) in row.zero.iter().enumerate() {
                if *z {
                    out.push((i + 1, row.m));
                }
            }
        }
        out
    }

    /// Negative entries counted with multiplicity 1 for `m = 0`, 2 otherwise.
    pub fn cover_negatives(&self, zero_tol: f64) -> usize {
        self.rows
            .iter()
            .map(|r| {
                let n = r.eigenvalues.iter().filter(|v| **v < -zero_tol).count();
                if r.m == 0 {
                    n
                } else {
                    2 * n
                }
            })
            .sum()
    }
}

/// `λ_i(m)` of the Robin-Robin problem for `m ≤ m_max`, `i ≤ i_max`.
pub fn ifs_table(pair: SurfacePair, m_max: u32, i_max: usize) -> Result<EigTable> {
    ifs_table_with(pair, m_max, i_max, DEFAULT_ZERO_TOL, 1e-7)
}

pub fn ifs_table_with(
    pair: SurfacePair,
    m_max: u32,
    i_max: usize,
    zero_tol: f64,
    tol: f64,
) -> Result<EigTable> {
    if m_max < 1 || i_max < 1 {
        return Err(crate::error::domain("m_max and i_max must be at least 1"));
    }
    let neck = solve_neck(pair.k(), pair.l(), 1e-12)?;
    let rows = (0..=m_max)
        .into_par_iter()
        .map(|m| {
            let s = eigenvalues(&ifs_problem(&neck, m), i_max, tol)?;
            Ok(EigRow {
                m,
                zero: s.eigenvalues.iter().map(|v| v.abs() <= zero_tol).collect(),
                eigenvalues: s.eigenvalues,
                convergence_estimate: s.convergence_estimate,
                grid_size: s.grid_size,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigTable {
        pair,
        t: neck.t,
        zero_tol,
        tol,
        rows,
    })
}

/// The three rotational zero modes at `m = 0, k - l, k + l`.
pub fn killing_field(neck: &NeckData, which: usize, t: f64) -> [f64; 2] {
    let (k, l) = (f64::from(neck.pair.k()), f64::from(neck.pair.l()));
    let c = CoefficientSet::new(neck);
    let (shl, chl, shk, chk) = (
        (l * t).sinh(),
        (l * t).cosh(),
        (k * t).sinh(),
        (k * t).cosh(),
    );
    let rho = c.rho(t);
    let first = k * shl * chl + l * shk * chk;
    match which {
        0 => [0.0, k * shl * chk / rho],
        1 => [first / rho, (-l * chk * chk + k * shl * shl) / rho],
        _ => [first / rho, (l * chk * chk + k * shl * shl) / rho],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KillingResidual {
    pub m: u32,
    /// Relative max-norm residual of `-h'' + A h` at interior nodes.
    pub interior: f64,
    /// Relative residual of the two Robin conditions (one-sided, 2nd order).
    pub robin: f64,
    pub intervals: usize,
}

impl KillingResidual {
    pub fn max(&self) -> f64 {
        self.interior.max(self.robin)
    }
}

pub const KILLING_INTERVALS: usize = 8192;

/// Residuals of the three zero modes in the interior problem.
pub fn ifs_killing_residuals(pair: SurfacePair) -> Result<[KillingResidual; 3]> {
    ifs_killing_residuals_with(pair, KILLING_INTERVALS)
}

pub fn ifs_killing_residuals_with(pair: SurfacePair, n: usize) -> Result<[KillingResidual; 3]> {
    let neck = solve_neck(pair.k(), pair.l(), 1e-12)?;
    let modes = [0, pair.k() - pair.l(), pair.k() + pair.l()];
    let r = |w: usize| {
        residual_of(
            &neck,
            &ifs_problem(&neck, modes[w]),
            |t| killing_field(&neck, w, t),
            n,
        )
    };
    Ok([r(0), r(1), r(2)])
}

fn residual_of(
    neck: &NeckData,
    p: &SlProblem,
    f: impl Fn(f64) -> [f64; 2],
    n: usize,
) -> KillingResidual {
    let h = (p.t1 - p.t0) / n as f64;
    let ts: Vec<f64> = (0..=n).map(|i| p.t0 + h * i as f64).collect();
    let v: Vec<[f64; 2]> = ts.iter().map(|&t| f(t)).collect();
    let (mut res, mut scale) = (0.0f64, 0.0f64);
    for i in 1..n {
        let a = p.potential_at(ts[i]);
        for c in 0..2 {
            let d2 = (v[i + 1][c] - 2.0 * v[i][c] + v[i - 1][c]) / (h * h);
            let av = a[c][0] * v[i][0] + a[c][1] * v[i][1];
            res = res.max((-d2 + av).abs());
            scale = scale.max(d2.abs()).max(av.abs());
        }
    }
    let (mut robin, mut rscale) = (0.0f64, 0.0f64);
    for c in 0..2 {
        let dr = (3.0 * v[n][c] - 4.0 * v[n - 1][c] + v[n - 2][c]) / (2.0 * h);
        let dl = (-3.0 * v[0][c] + 4.0 * v[1][c] - v[2][c]) / (2.0 * h);
        robin = robin
            .max((dr - neck.rho_t * v[n][c]).abs())
            .max((dl + neck.rho_t * v[0][c]).abs());
        rscale = rscale.max(dr.abs()).max(dl.abs());
    }
    KillingResidual {
        m: p.m,
        interior: res / scale.max(f64::MIN_POSITIVE),
        robin: robin / rscale.max(f64::MIN_POSITIVE),
        intervals: n,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IfsBounds {
    pub pair: SurfacePair,
    /// Lower bound for the index of the interior surface.
    pub lower: i64,
    /// Upper bound from the Steklov spectral index.
    pub upper: i64,
    pub conjectured_cover_lower: i64,
    /// Negative table entries with multiplicity, from `ifs_table`.
    pub numeric_cover_count: Option<usize>,
    pub notes: Vec<String>,
}

pub fn ifs_upper_closed_form(pair: SurfacePair) -> i64 {
    let s = i64::from(pair.k() + pair.l());
    if pair.k_is_even() {
        4 * s - 7
    } else {
        8 * s - 7
    }
}

pub fn conjectured_cover_lower(pair: SurfacePair) -> i64 {
    6 * i64::from(pair.k()) + 2 * i64::from(pair.l()) - 1
}

/// Negative-entry count of the cover, extending the table in `m` until a
/// row past `k + l` has no negative entry.
pub fn numeric_cover_count(pair: SurfacePair, zero_tol: f64) -> Result<(usize, EigTable)> {
    let mut m_max = pair.k() + pair.l() + 2;
    loop {
        let table = ifs_table(pair, m_max, 5)?;
        let last = table.rows.last().map(|r| r.eigenvalues[0]).unwrap_or(0.0);
        if last > zero_tol {
            return Ok((table.cover_negatives(zero_tol), table));
        }
        m_max += 4;
    }
}

pub fn ifs_index_bounds(pair: SurfacePair, numeric: bool) -> Result<IfsBounds> {
    let numeric_cover_count = if numeric {
        Some(numeric_cover_count(pair, DEFAULT_ZERO_TOL)?.0)
    } else {
        None
    };
    let mut notes = Vec::new();
    if pair.k_is_even() {
        notes.push(format!(
            "lower bound k-1 = {} follows the displayed even-k formula; one prose statement for (2,1) reads '>= 2'",
            pair.k() - 1
        ));
    }
    Ok(IfsBounds {
        pair,
        lower: fs_index_closed_form(pair),
        upper: ifs_upper_closed_form(pair),
        conjectured_cover_lower: conjectured_cover_lower(pair),
        numeric_cover_count,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    pub pair: SurfacePair,
    pub interior_cover_numeric: usize,
    pub exterior_numeric: usize,
    pub complete_cover_closed_form: i64,
    pub holds: bool,
}

/// `Ind(IFS cover) + Ind(EFS) ≥ Ind(FS cover)` with the exterior index
/// taken as 0 (stability evidence).
pub fn split_check(pair: SurfacePair) -> Result<SplitReport> {
    let (interior, _) = numeric_cover_count(pair, DEFAULT_ZERO_TOL)?;
    let complete = 2 * i64::from(pair.k()) - 1;
    let holds = interior as i64 >= complete;
    if !holds {
        return Err(Error::Verification {
            what: format!("index split for {pair}"),
            closed: complete,
            numeric: interior as i64,
        });
    }
    Ok(SplitReport {
        pair,
        interior_cover_numeric: interior,
        exterior_numeric: 0,
        complete_cover_closed_form: complete,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureObservation {
    pub pair: SurfacePair,
    /// Zero cells `(i, m)` found (1-based `i`).
    pub zero_cells: Vec<(usize, u32)>,
    pub predicted_zero_cells: Vec<(usize, u32)>,
    pub zero_pattern_matches: bool,
    pub numeric_cover_count: usize,
    pub conjectured_cover_lower: i64,
    pub count_reaches_conjecture: bool,
    /// Predicted-negative cells that are not negative.
    pub sign_pattern_misses: Vec<(usize, u32)>,
}

/// Zero locations `(2, k+l), (3, k-l), (4, 0)`, the predicted negative
/// cells and the cover count, compared with the computed table.
pub fn ifs_conjecture_observation(
    pair: SurfacePair,
    zero_tol: f64,
) -> Result<ConjectureObservation> {
    let (count, table) = numeric_cover_count(pair, zero_tol)?;
    let (k, l) = (pair.k(), pair.l());
    let mut predicted = vec![(2, k + l), (3, k - l), (4, 0)];
    predicted.sort();
    let mut found: Vec<(usize, u32)> = table
        .rows
        .iter()
        .flat_map(|r| {
            r.eigenvalues
                .iter()
                .enumerate()
                .filter(|(_, v)| v.abs() < zero_tol)
                .map(move |(i, _)| (i + 1, r.m))
        })
        .collect();
    found.sort();
    let mut misses = Vec::new();
    for row in &table.rows {
        let m = row.m;
        let cells = [(1, m <= k + l), (2, m < k + l), (3, m + l < k)];
        for (i, predicted_negative) in cells {
            if predicted_negative && !(row.eigenvalues[i - 1] < -zero_tol) {
                misses.push((i, m));
            }
        }
    }
    let conj = conjectured_cover_lower(pair);
    Ok(ConjectureObservation {
        pair,
        zero_pattern_matches: found == predicted,
        zero_cells: found,
        predicted_zero_cells: predicted,
        numeric_cover_count: count,
        conjectured_cover_lower: conj,
        count_reaches_conjecture: count as i64 >= conj,
        sign_pattern_misses: misses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_arithmetic() {
        let p = |k, l| SurfacePair::new(k, l).unwrap();
        assert_eq!(ifs_upper_closed_form(p(2, 1)), 5);
        assert_eq!(ifs_upper_closed_form(p(7, 3)), 73);
        assert_eq!(ifs_upper_closed_form(p(5, 2)), 49);
        assert_eq!(conjectured_cover_lower(p(7, 3)), 47);
        let b = ifs_index_bounds(p(2, 1), false).unwrap();
        assert_eq!(b.lower, 1);
        assert!(!b.notes.is_empty());
    }

    #[test]
    fn killing_fields_are_zero_modes() {
        for (k, l) in [(7, 3), (2, 1), (5, 2)] {
            let r = ifs_killing_residuals(SurfacePair::new(k, l).unwrap()).unwrap();
            for x in &r {
                assert!(x.max() < 1e-6, "{k},{l}: {x:?}");
            }
        }
    }

    #[test]
    fn killing_residual_is_second_order() {
        let pair = SurfacePair::new(7, 3).unwrap();
        let a = ifs_killing_residuals_with(pair, 512).unwrap();
        let b = ifs_killing_residuals_with(pair, 1024).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let ratio = x.interior / y.interior;
            assert!((3.5..4.5).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn table_row_zero() {
        let t = ifs_table(SurfacePair::new(7, 3).unwrap(), 1, 5).unwrap();
        let reference = REFERENCE_7_3[0];
        for (i, v) in reference.iter().enumerate() {
            assert!((t.entry(0, i + 1).unwrap() - v).abs() < 0.01);
        }
        assert!(t.rows[0].zero[3]);
    }
}
