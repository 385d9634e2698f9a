//! Closed-form index bounds for exterior free boundary minimal surfaces.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::geometry::{total_curvature, SurfaceKind, SurfacePair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopologicalBounds {
    pub total_curvature: f64,
    pub genus: u32,
    pub boundary_components: u32,
    pub ends: u32,
    /// `-TC/π + 2γ - 2 + b`, raw and clamped at 0.
    pub riemann_roch: f64,
    pub riemann_roch_clamped: f64,
    /// `-TC/π + γ + n - 1`, raw and clamped at 0.
    pub ejiri_micallef: f64,
    pub ejiri_micallef_clamped: f64,
}

/// Both bounds for generic data `(TC, γ, b, n)`.
pub fn topological_bounds(
    tc: f64,
    genus: u32,
    boundary_components: u32,
    ends: u32,
) -> Result<TopologicalBounds> {
    if !tc.is_finite() {
        return Err(domain("total curvature must be finite"));
    }
    let (g, b, n) = (
        f64::from(genus),
        f64::from(boundary_components),
        f64::from(ends),
    );
    let rr = -tc / PI + 2.0 * g - 2.0 + b;
    let em = -tc / PI + g + n - 1.0;
    Ok(TopologicalBounds {
        total_curvature: tc,
        genus,
        boundary_components,
        ends,
        riemann_roch: rr,
        riemann_roch_clamped: rr.max(0.0),
        ejiri_micallef: em,
        ejiri_micallef_clamped: em.max(0.0),
    })
}

/// Bounds for the exterior surface: genus 0, one boundary circle, one end.
pub fn topological_bounds_for(pair: SurfacePair) -> TopologicalBounds {
    let tc = total_curvature(pair, SurfaceKind::Efs);
    topological_bounds(tc, 0, 1, 1).expect("closed-form curvature is finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exterior_seven_three() {
        let b = topological_bounds_for(SurfacePair::new(7, 3).unwrap());
        assert!((b.riemann_roch - 13.0).abs() < 1e-12);
    }

    #[test]
    fn catenoidal_and_clamped() {
        let b = topological_bounds(-2.0 * PI, 0, 1, 1).unwrap();
        assert!((b.riemann_roch - 1.0).abs() < 1e-12);
        let z = topological_bounds(0.0, 0, 1, 1).unwrap();
        assert_eq!(z.riemann_roch, -1.0);
        assert_eq!(z.riemann_roch_clamped, 0.0);
        assert!(topological_bounds(f64::NAN, 0, 1, 1).is_err());
    }
}
