use std::f64::consts::PI;

use approx::assert_relative_eq;
use fsmorse::geometry::{solve_neck, CoefficientSet, SurfacePair};
use fsmorse::index::{fs_index, ifs_index_bounds, IndexMode};
use fsmorse::steklov::{spectral_index, spectral_index_closed_form};
use fsmorse::sturm_liouville::{eigenvalues, BoundaryCondition, SlProblem};
use fsmorse::Error;
use proptest::prelude::*;

fn coprime() -> impl Strategy<Value = SurfacePair> {
    (2u32..40, 1u32..40).prop_filter_map("coprime k > l", |(k, l)| SurfacePair::new(k, l).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn neck_solves_the_free_boundary_condition(pair in coprime()) {
        let neck = solve_neck(pair.k(), pair.l(), 1e-12).unwrap();
        let (k, l) = (f64::from(pair.k()), f64::from(pair.l()));
        let lhs = k * (k * neck.t).tanh();
        let rhs = l / (l * neck.t).tanh();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs);
        let c = CoefficientSet::new(&neck);
        prop_assert!((c.rho(neck.t) - neck.rho_t).abs() <= 1e-9 * neck.rho_t);
    }

    #[test]
    fn steklov_count_matches_closed_form(pair in coprime()) {
        prop_assert_eq!(spectral_index(pair, IndexMode::Numeric).unwrap(), spectral_index_closed_form(pair));
    }

    #[test]
    fn constant_potential_shifts_dirichlet_spectrum(c in -5.0f64..5.0, len in 0.5f64..3.0) {
        let p = SlProblem::scalar(0.0, len, move |_| c, |_| 1.0);
        let s = eigenvalues(&p, 2, 1e-6).unwrap();
        let base = (PI / len).powi(2);
        prop_assert!((s.eigenvalues[0] - (c + base)).abs() < 1e-5);
        prop_assert!((s.eigenvalues[1] - (c + 4.0 * base)).abs() < 1e-4);
    }
}

#[test]
fn neumann_cosine_modes() {
    let p = SlProblem::scalar(0.0, 1.0, |_| 0.0, |_| 1.0)
        .with_left(BoundaryCondition::NEUMANN)
        .with_right(BoundaryCondition::NEUMANN);
    let s = eigenvalues(&p, 3, 1e-8).unwrap();
    assert_relative_eq!(s.eigenvalues[0], 0.0, epsilon = 1e-7);
    assert_relative_eq!(s.eigenvalues[1], PI * PI, max_relative = 1e-7);
    assert_relative_eq!(s.eigenvalues[2], 4.0 * PI * PI, max_relative = 1e-7);
}

#[test]
fn closed_form_report_serializes() {
    let r = fs_index(SurfacePair::new(7, 3).unwrap(), IndexMode::ClosedForm).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["index_closed_form"], 13);
    assert_eq!(v["kind"], "FS");
    assert!(v["index_numeric"].is_null());
}

#[test]
fn interior_bounds_are_ordered() {
    for (k, l) in [(2, 1), (3, 2), (7, 3), (8, 5)] {
        let b = ifs_index_bounds(SurfacePair::new(k, l).unwrap(), false).unwrap();
        assert!(b.lower <= b.upper, "{k},{l}");
    }
}

#[test]
fn bad_pairs_are_domain_errors() {
    for (k, l) in [(4, 2), (3, 3), (1, 2), (5, 0)] {
        assert!(matches!(SurfacePair::new(k, l), Err(Error::Domain(_))));
    }
}
