use serde::Serialize;
use std::f64::consts::PI;

use super::{CoefficientSet, NeckData};
use crate::error::{domain, Result};

/// Uniform grid: `nt` points on `[t0, t1]` (ends included) by `ntheta`
/// periodic points on `[0, period)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
    pub ntheta: usize,
    pub theta_period: f64,
}

impl GridSpec {
    pub fn new(t0: f64, t1: f64, nt: usize, ntheta: usize) -> Self {
        Self {
            t0,
            t1,
            nt,
            ntheta,
            theta_period: 2.0 * PI,
        }
    }

    pub fn ht(&self) -> f64 {
        (self.t1 - self.t0) / (self.nt - 1) as f64
    }

    pub fn htheta(&self) -> f64 {
        self.theta_period / self.ntheta as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + self.ht() * i as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        self.htheta() * j as f64
    }

    /// Halves both spacings; every old node stays a node.
    pub fn refined(&self) -> Self {
        Self {
            nt: 2 * (self.nt - 1) + 1,
            ntheta: 2 * self.ntheta,
            ..*self
        }
    }
}

/// Normal section `f1 n1 + f2 n2` sampled row-major (t outer, θ inner).
#[derive(Debug, Clone, PartialEq)]
pub struct SectionGrid {
    pub spec: GridSpec,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
}

impl SectionGrid {
    pub fn from_fn(spec: GridSpec, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let mut f1 = Vec::with_capacity(spec.nt * spec.ntheta);
        let mut f2 = Vec::with_capacity(spec.nt * spec.ntheta);
        for i in 0..spec.nt {
            for j in 0..spec.ntheta {
                let [a, b] = f(spec.t(i), spec.theta(j));
                f1.push(a);
                f2.push(b);
            }
        }
        Self { spec, f1, f2 }
    }

    pub fn at(&self, i: usize, j: usize) -> [f64; 2] {
        let idx = i * self.spec.ntheta + j;
        [self.f1[idx], self.f2[idx]]
    }

    pub fn max_abs(&self) -> f64 {
        self.f1
            .iter()
            .chain(&self.f2)
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Applies the Jacobi operator
/// `ρ² L f = (Δ f1 + 2b ∂θ f2 + (2a²-b²) f1, Δ f2 - 2b ∂θ f1 + (2c²-b²) f2)`
/// with second-order central differences. The result lives on the interior
/// t-rows only (`nt - 2` rows).
pub fn jacobi_apply(neck: &NeckData, section: &SectionGrid) -> Result<SectionGrid> {
    let spec = section.spec;
    if spec.nt < 5 || spec.ntheta < 5 {
        return Err(domain(format!(
            "grid {}x{} too coarse, need at least 5 points per direction",
            spec.nt, spec.ntheta
        )));
    }
    if section.f1.len() != spec.nt * spec.ntheta || section.f2.len() != spec.nt * spec.ntheta {
        return Err(domain("section size does not match its grid"));
    }
    let c = CoefficientSet::new(neck);
    let (ht, hth) = (spec.ht(), spec.htheta());
    let (it2, ith2, ith) = (1.0 / (ht * ht), 1.0 / (hth * hth), 0.5 / hth);
    let nth = spec.ntheta;
    let out_spec = GridSpec {
        t0: spec.t(1),
        t1: spec.t(spec.nt - 2),
        nt: spec.nt - 2,
        ..spec
    };
    let mut g1 = Vec::with_capacity(out_spec.nt * nth);
    let mut g2 = Vec::with_capacity(out_spec.nt * nth);
    for i in 1..spec.nt - 1 {
        let t = spec.t(i);
        let (a, b, cc) = (c.a(t), c.b(t), c.c(t));
        let inv_rho2 = (-c.ln_rho2(t)).exp();
        for j in 0..nth {
            let (jp, jm) = ((j + 1) % nth, (j + nth - 1) % nth);
            let [x1, x2] = section.at(i, j);
            let lap = |comp: usize| {
                let v = |ii: usize, jj: usize| section.at(ii, jj)[comp];
                (v(i + 1, j) - 2.0 * v(i, j) + v(i - 1, j)) * it2
                    + (v(i, jp) - 2.0 * v(i, j) + v(i, jm)) * ith2
            };
            let dth = |comp: usize| (section.at(i, jp)[comp] - section.at(i, jm)[comp]) * ith;
            g1.push(inv_rho2 * (lap(0) + 2.0 * b * dth(1) + (2.0 * a * a - b * b) * x1));
            g2.push(inv_rho2 * (lap(1) - 2.0 * b * dth(0) + (2.0 * cc * cc - b * b) * x2));
        }
    }
    Ok(SectionGrid {
        spec: out_spec,
        f1: g1,
        f2: g2,
    })
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn neck73() -> NeckData {
        solve_neck(7, 3, 1e-12).unwrap()
    }

    #[test]
    fn coarse_grid_rejected() {
        let spec = GridSpec::new(-1.0, 1.0, 4, 16);
        let s = SectionGrid::from_fn(spec, |_, _| [0.0, 0.0]);
        assert!(jacobi_apply(&neck73(), &s).is_err());
    }

    #[test]
    fn zero_maps_to_zero() {
        let spec = GridSpec::new(-1.0, 1.0, 33, 32);
        let s = SectionGrid::from_fn(spec, |_, _| [0.0, 0.0]);
        let out = jacobi_apply(&neck73(), &s).unwrap();
        assert_eq!(out.max_abs(), 0.0);
        assert_eq!(out.spec.nt, 31);
    }

    // (h1 cos mθ, h2 sin mθ) must reproduce (h'' - A h)/ρ² times the angular factors.
    #[test]
    fn separated_section_matches_one_dimensional_operator() {
        let n = neck73();
        let c = CoefficientSet::new(&n);
        let m = 4.0;
        let h = |t: f64| [(-t * t).exp() * (1.0 + t), (2.0 * t).sin()];
        let hpp = |t: f64| {
            let e = (-t * t).exp();
            // d²/dt² of e^{-t²}(1+t)
            let h1 = e * ((4.0 * t * t - 2.0) * (1.0 + t) - 4.0 * t);
            [h1, -4.0 * (2.0 * t).sin()]
        };
        let mut errs = Vec::new();
        for nt in [129usize, 257] {
            let spec = GridSpec::new(-1.0, 1.0, nt, 2 * (nt - 1));
            let s = SectionGrid::from_fn(spec, |t, th| {
                let v = h(t);
                [v[0] * (m * th).cos(), v[1] * (m * th).sin()]
            });
            let out = jacobi_apply(&n, &s).unwrap();
            let mut err: f64 = 0.0;
            for i in 0..out.spec.nt {
                let t = out.spec.t(i);
                let a = c.potential(m, t);
                let (v, d) = (h(t), hpp(t));
                let r1 = (d[0] - a[0][0] * v[0] - a[0][1] * v[1]) / c.rho2(t);
                let r2 = (d[1] - a[1][0] * v[0] - a[1][1] * v[1]) / c.rho2(t);
                for j in (0..out.spec.ntheta).step_by(7) {
                    let th = out.spec.theta(j);
                    let g = out.at(i, j);
                    err = err
                        .max((g[0] - r1 * (m * th).cos()).abs())
                        .max((g[1] - r2 * (m * th).sin()).abs());
                }
            }
            errs.push(err);
        }
        assert!(errs[1] < 1e-2, "{errs:?}");
        let ratio = errs[0] / errs[1];
        assert!((3.0..5.0).contains(&ratio), "{errs:?}");
    }
}
