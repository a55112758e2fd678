mod common;

use common::*;
use heun_core::connection::wronskian;
use heun_core::continuation::{series_state, ContinuationPath, continue_along_path};
use heun_core::frobenius::{confluent_series, Branch, SingularPoint, DEFAULT_TERMS};
use heun_core::spectral::{
    boundary_solution, find_modes, find_modes_with, matching_determinant, rw_to_confluent, rw_to_confluent_checked, BoundaryCondition,
    MatchConfig, RWProblem, Region, SearchOptions, Surface,
};
use heun_core::C64;
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn bh() -> RWProblem {
    RWProblem::black_hole(1.0, 2, 2).unwrap()
}

fn region() -> Region {
    Region::new(0.2, 0.5, -0.35, -0.03).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transformation_residual(m in 0.3f64..3.0, ell in 2u32..5, s in 0i32..3, re in -1.0f64..1.0, im in -0.8f64..0.4) {
        let w = C64::new(re, im);
        prop_assume!(w.norm() > 0.05);
        let p = RWProblem::black_hole(m, ell, s).unwrap();
        prop_assert!(rw_to_confluent_checked(&p, w).is_ok());
    }

    #[test]
    fn parameter_map_depends_on_m_omega(m in 0.3f64..3.0, k in 0i32..4, re in 0.1f64..1.0, im in -0.8f64..0.0) {
        let w = C64::new(re, im);
        let lam = 2f64.powi(k);
        let a = rw_to_confluent(&RWProblem::black_hole(m, 2, 2).unwrap(), w).unwrap().0;
        let b = rw_to_confluent(&RWProblem::black_hole(m * lam, 2, 2).unwrap(), w / lam).unwrap().0;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reflection_symmetry(re in 0.15f64..0.8, im in -0.6f64..-0.02, rho in -0.9f64..0.9) {
        let p = bh().with_rho(C64::new(rho, 0.0)).unwrap();
        let w = C64::new(re, im);
        let d = matching_determinant(&p, w, TOL).unwrap();
        let m = matching_determinant(&p, -w.conj(), TOL).unwrap();
        prop_assert!((m - d.conj()).norm() < 1e-8, "{} {}", d, m);
    }
}

#[test]
fn horizon_state_is_the_ingoing_branch() {
    let p = bh();
    let (params, _) = rw_to_confluent(&p, c(0.4, -0.1)).unwrap();
    let cfg = MatchConfig::default();
    let st = boundary_solution(&params, &p.inner_condition(), &cfg, TOL).unwrap().state;
    let sol = confluent_series(&params, SingularPoint::One, Branch::First, DEFAULT_TERMS).unwrap();
    let seed = series_state(&sol, c(1.5, 0.0), 1e-15).unwrap();
    let path = ContinuationPath::new(vec![c(1.5, 0.0), st.z], 0.1).unwrap();
    let branch = continue_along_path(&params, seed, &path, TOL).unwrap();
    let w = wronskian(&st, &branch).unwrap();
    assert!(w.norm() <= 1e-9 * st.magnitude() * branch.magnitude());
}

#[test]
fn opposite_reflections_are_independent() {
    let (params, _) = rw_to_confluent(&bh(), c(0.4, -0.1)).unwrap();
    let cfg = MatchConfig::default();
    let state = |rho: f64| {
        let cond = BoundaryCondition::Mixed { rho: c(rho, 0.0), z_surface: 1.5 };
        boundary_solution(&params, &cond, &cfg, TOL).unwrap().state
    };
    let (a, b) = (state(1.0), state(-1.0));
    let w = wronskian(&a, &b).unwrap().norm() / (a.magnitude() * b.magnitude());
    assert!(w > 1e-3, "{w}");
}

#[test]
fn asymptotic_seed_is_stable_under_doubling_r() {
    for w in [c(0.37, -0.09), c(0.35, -0.27), c(0.6, -0.2)] {
        let (params, _) = rw_to_confluent(&bh(), w).unwrap();
        let at = |r0: f64| {
            let cfg = MatchConfig::default().with_r_start(r0);
            boundary_solution(&params, &BoundaryCondition::RecessiveAtInfinity, &cfg, TOL).unwrap()
        };
        let (a, b) = (at(15.0), at(30.0));
        let ratio = wronskian(&a.state, &b.state).unwrap().norm() / (a.state.magnitude() * b.state.magnitude());
        assert!(ratio.asin() <= 1e-7, "angle {ratio} at {w}");
    }
}

#[test]
fn roots_stable_under_halved_tolerance() {
    let mut a = SearchOptions::new(1e-9);
    a.cont_tol = Some(2e-12);
    a.audit = false;
    let mut b = a;
    b.cont_tol = Some(1e-12);
    let ra = find_modes_with(&bh(), region(), (12, 12), &a).unwrap();
    let rb = find_modes_with(&bh(), region(), (12, 12), &b).unwrap();
    assert_eq!(ra.modes.len(), rb.modes.len());
    for (x, y) in ra.modes.iter().zip(&rb.modes) {
        assert!((x.omega - y.omega).norm() <= 1e-7);
        assert!(x.residual <= 1e-9 && y.residual <= 1e-9);
    }
}

#[test]
fn mirrored_region_has_mirrored_roots() {
    let r = find_modes(&bh(), region(), (12, 12), 1e-9).unwrap();
    let m = find_modes(&bh(), region().mirrored(), (12, 12), 1e-9).unwrap();
    assert_eq!(r.modes.len(), m.modes.len());
    for (x, y) in r.modes.iter().zip(&m.modes) {
        assert!((x.omega + y.omega.conj()).norm() < 1e-6);
    }
}

#[test]
fn damped_and_sorted() {
    let r = find_modes(&bh(), region(), (10, 10), 1e-9).unwrap();
    assert!(!r.modes.is_empty());
    for (n, m) in r.modes.iter().enumerate() {
        assert_eq!(m.overtone_hint, n);
        assert!(m.omega.im < 0.0);
    }
    assert!(r.modes.windows(2).all(|w| w[0].omega.im.abs() <= w[1].omega.im.abs()));
    assert_eq!(r.grid.abs_d.len(), 10);
}

#[test]
fn small_grids_and_bad_regions_are_rejected() {
    assert!(find_modes(&bh(), region(), (4, 12), 1e-9).is_err());
    assert!(Region::new(-0.1, 0.1, -0.1, 0.1).is_err());
}

#[test]
fn reflecting_surface_outside_series_disc() {
    // r = 6M puts the surface at z = 3, reached by continuation from the horizon disc
    let p = RWProblem::new(1.0, 2, 2, c(0.5, 0.0), Surface::Radius(6.0)).unwrap();
    let d = matching_determinant(&p, c(0.4, -0.1), TOL).unwrap();
    assert!(d.norm().is_finite() && d.norm() <= 1.0);
}
