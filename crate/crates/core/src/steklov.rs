//! Closed-form Steklov spectrum of the interior surfaces.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::geometry::{solve_neck, SurfacePair};
use crate::index::{ifs_upper_closed_form, IndexMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `m tanh(mT)/ρ(T)`, eigenfunctions `cosh(mt)` times a harmonic.
    Lambda,
    /// `m coth(mT)/ρ(T)`, eigenfunctions `sinh(mt)` times a harmonic.
    Mu,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteklovEntry {
    pub value: f64,
    pub family: Family,
    pub m: u32,
    pub multiplicity: u32,
    /// Whether the eigenfunctions live on the non-orientable quotient; always
    /// true for odd `k`.
    pub parity_admissible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteklovSpectrum {
    pub pair: SurfacePair,
    #[serde(rename = "T")]
    pub t: f64,
    pub rho_t: f64,
    pub entries: Vec<SteklovEntry>,
}

impl SteklovSpectrum {
    pub fn value(&self, family: Family, m: u32) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.family == family && e.m == m)
            .map(|e| e.value)
    }
}

pub fn steklov_spectrum(pair: SurfacePair, m_max: u32) -> Result<SteklovSpectrum> {
    if m_max < pair.k() {
        return Err(domain(format!(
            "m_max = {m_max} must be at least k = {}",
            pair.k()
        )));
    }
    let neck = solve_neck(pair.k(), pair.l(), 1e-12)?;
    let (t, rho) = (neck.t, neck.rho_t);
    let even = pair.k_is_even();
    let mut entries = vec![
        SteklovEntry {
            value: 0.0,
            family: Family::Lambda,
            m: 0,
            multiplicity: 1,
            parity_admissible: true,
        },
        SteklovEntry {
            value: 1.0 / (t * rho),
            family: Family::Mu,
            m: 0,
            multiplicity: 1,
            parity_admissible: !even,
        },
    ];
    for m in 1..=m_max {
        let mf = f64::from(m);
        let lam = mf * (mf * t).tanh() / rho;
        let mu = mf / (mf * t).tanh() / rho;
        entries.push(SteklovEntry {
            value: lam,
            family: Family::Lambda,
            m,
            multiplicity: 2,
            parity_admissible: !even || m % 2 == 0,
        });
        entries.push(SteklovEntry {
            value: mu,
            family: Family::Mu,
            m,
            multiplicity: 2,
            parity_admissible: !even || m % 2 == 1,
        });
    }
    Ok(SteklovSpectrum {
        pair,
        t,
        rho_t: rho,
        entries,
    })
}

pub fn spectral_index_closed_form(pair: SurfacePair) -> i64 {
    let s = i64::from(pair.k() + pair.l());
    if pair.k_is_even() {
        s - 2
    } else {
        2 * (s - 1)
    }
}

/// Steklov eigenvalues below 1 with multiplicity, restricted to admissible
/// eigenfunctions for even `k`.
pub fn spectral_index(pair: SurfacePair, mode: IndexMode) -> Result<i64> {
    let closed = spectral_index_closed_form(pair);
    if mode == IndexMode::ClosedForm {
        return Ok(closed);
    }
    let spec = steklov_spectrum(pair, pair.k() + pair.l())?;
    let numeric: i64 = spec
        .entries
        .iter()
        .filter(|e| e.parity_admissible && e.value < 1.0 - 1e-9)
        .map(|e| i64::from(e.multiplicity))
        .sum();
    if numeric != closed {
        return Err(Error::Verification {
            what: format!("spectral index of IFS{pair}"),
            closed,
            numeric,
        });
    }
    Ok(numeric)
}

/// `4 · spectral index + 1` (four coordinates, a one-dimensional moduli
/// space), checked against the closed form.
pub fn index_upper_bound(pair: SurfacePair) -> Result<i64> {
    let bound = 4 * spectral_index(pair, IndexMode::Numeric)? + 1;
    let closed = ifs_upper_closed_form(pair);
    if bound != closed {
        return Err(Error::Verification {
            what: format!("index upper bound of IFS{pair}"),
            closed,
            numeric: bound,
        });
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(k: u32, l: u32) -> SurfacePair {
        SurfacePair::new(k, l).unwrap()
    }

    #[test]
    fn unit_eigenvalues() {
        let s = steklov_spectrum(pair(7, 3), 12).unwrap();
        assert!((s.value(Family::Lambda, 7).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.value(Family::Mu, 3).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s.value(Family::Lambda, 0), Some(0.0));
        let mu0 = s.value(Family::Mu, 0).unwrap();
        assert!(mu0 < 1.0 && s.t * s.rho_t > 1.0);
    }

    #[test]
    fn known_indices() {
        assert_eq!(spectral_index(pair(7, 3), IndexMode::Numeric).unwrap(), 18);
        assert_eq!(spectral_index(pair(2, 1), IndexMode::Numeric).unwrap(), 1);
        assert_eq!(spectral_index(pair(3, 2), IndexMode::Numeric).unwrap(), 8);
        assert_eq!(index_upper_bound(pair(2, 1)).unwrap(), 5);
        assert_eq!(index_upper_bound(pair(7, 3)).unwrap(), 73);
        assert_eq!(index_upper_bound(pair(5, 2)).unwrap(), 49);
    }

    #[test]
    fn small_m_max_rejected() {
        assert!(steklov_spectrum(pair(7, 3), 5).is_err());
    }
}
