//! The separated eigenproblems of the complete, interior and exterior surfaces.

use crate::geometry::{CoefficientSet, NeckData};
use crate::sturm_liouville::{BoundaryCondition, SlProblem};

/// Mode-`m` problem of the complete surface truncated to `[-T, T]` with
/// Dirichlet ends.
pub fn fs_problem(coeffs: CoefficientSet, m: u32, truncation: f64) -> SlProblem {
    let mf = f64::from(m);
    SlProblem::vector(
        -truncation,
        truncation,
        move |t| coeffs.potential(mf, t),
        move |t| coeffs.rho2(t),
    )
    .with_mode(m)
}

/// Mode-`m` problem of the interior surface: `[-T, T]` with
/// `h'(T) = ρ(T) h(T)` and `h'(-T) = -ρ(T) h(-T)`.
pub fn ifs_problem(neck: &NeckData, m: u32) -> SlProblem {
    let coeffs = CoefficientSet::new(neck);
    let mf = f64::from(m);
    SlProblem::vector(
        -neck.t,
        neck.t,
        move |t| coeffs.potential(mf, t),
        move |t| coeffs.rho2(t),
    )
    .with_mode(m)
    .with_left(BoundaryCondition::Robin {
        coefficient: -neck.rho_t,
    })
    .with_right(BoundaryCondition::Robin {
        coefficient: neck.rho_t,
    })
}

/// Mode-`m` problem of the exterior surface truncated at `T`: `[T_p, T]`
/// with `h'(T_p) = ρ(T_p) h(T_p)` and `h(T) = 0`. `neck` should use the
/// rational parametrization.
pub fn efs_problem(neck: &NeckData, m: u32, truncation: f64) -> SlProblem {
    let coeffs = CoefficientSet::new(neck);
    let mf = f64::from(m);
    SlProblem::vector(
        neck.t,
        truncation,
        move |t| coeffs.potential(mf, t),
        move |t| coeffs.rho2(t),
    )
    .with_mode(m)
    .with_left(BoundaryCondition::Robin {
        coefficient: neck.rho_t,
    })
    .with_right(BoundaryCondition::Dirichlet)
}
