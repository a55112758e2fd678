mod common;

use common::*;
use heun_core::continuation::{continue_along_path, monodromy_matrix, series_state, ContinuationPath, StatePair};
use heun_core::frobenius::{local_series, Branch, SingularPoint, DEFAULT_TERMS};
use heun_core::{EquationParams, Equation, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-13;

fn close(a: &StatePair, b: &StatePair, bound: f64) -> bool {
    ((a.h - b.h).norm() + (a.hp - b.hp).norm()) <= bound * a.magnitude().max(1.0)
}

fn equations(seed: u64, n: usize) -> Vec<EquationParams> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| if k % 2 == 0 { EquationParams::General(general_generic(&mut r)) } else { EquationParams::Confluent(confluent(&mut r)) })
        .collect()
}

#[test]
fn continued_series_matches_series() {
    for eq in equations(21, 10) {
        let sol = local_series(&eq, SingularPoint::Zero, Branch::Second, DEFAULT_TERMS).unwrap();
        let a = c(0.3, -0.2);
        let b = c(-0.1, 0.6);
        let start = series_state(&sol, a, 1e-15).unwrap();
        let path = ContinuationPath::new(vec![a, c(0.5, 0.3), b], 0.1).unwrap();
        let end = continue_along_path(&eq, start, &path, TOL).unwrap();
        let direct = series_state(&sol, b, 1e-15).unwrap();
        assert!(close(&direct, &end, 1e-10), "{direct:?} {end:?}");
    }
}

#[test]
fn refinement_does_not_change_result() {
    let mut r = ChaCha8Rng::seed_from_u64(22);
    for eq in equations(23, 10) {
        let s = StatePair::new(c(0.3, 0.3), disc(&mut r, 1.0), disc(&mut r, 1.0));
        let path = ContinuationPath::straight(&eq, s.z, c(1.8, -0.7), 0.1).unwrap();
        let a = continue_along_path(&eq, s, &path, TOL).unwrap();
        let b = continue_along_path(&eq, s, &path.refined(3), TOL).unwrap();
        assert!(close(&a, &b, 1e-10));
    }
}

#[test]
fn composition_of_paths() {
    let mut r = ChaCha8Rng::seed_from_u64(24);
    for eq in equations(25, 10) {
        let s = StatePair::new(c(-0.3, 0.2), disc(&mut r, 1.0), disc(&mut r, 1.0));
        let mid = c(0.5, 1.2);
        let p1 = ContinuationPath::straight(&eq, s.z, mid, 0.1).unwrap();
        let p2 = ContinuationPath::straight(&eq, mid, c(2.2, 0.4), 0.1).unwrap();
        let whole = continue_along_path(&eq, s, &p1.then(&p2).unwrap(), TOL).unwrap();
        let step = continue_along_path(&eq, continue_along_path(&eq, s, &p1, TOL).unwrap(), &p2, TOL).unwrap();
        assert!(close(&whole, &step, 1e-10));
    }
}

#[test]
fn homotopic_paths_agree() {
    // two routes from 0.5i to 0.5 + 1.5i that enclose no singular point
    let mut r = ChaCha8Rng::seed_from_u64(26);
    for eq in equations(27, 10) {
        if eq.finite_singularities().iter().any(|s| s.im > 0.2 && s.im < 1.8 && s.re > -0.4 && s.re < 1.4) {
            continue;
        }
        let s = StatePair::new(c(0.0, 0.5), disc(&mut r, 1.0), disc(&mut r, 1.0));
        let left = ContinuationPath::new(vec![s.z, c(-0.3, 1.0), c(0.5, 1.5)], 0.1).unwrap();
        let right = ContinuationPath::new(vec![s.z, c(1.2, 0.6), c(1.2, 1.4), c(0.5, 1.5)], 0.1).unwrap();
        let a = continue_along_path(&eq, s, &left, TOL).unwrap();
        let b = continue_along_path(&eq, s, &right, TOL).unwrap();
        assert!(close(&a, &b, 1e-10));
    }
}

#[test]
fn local_monodromy_is_diagonal() {
    for eq in equations(28, 12) {
        let basis = [
            local_series(&eq, SingularPoint::One, Branch::First, DEFAULT_TERMS).unwrap(),
            local_series(&eq, SingularPoint::One, Branch::Second, DEFAULT_TERMS).unwrap(),
        ];
        let lp = ContinuationPath::loop_around(&eq, c(1.3, 0.1), c(1.0, 0.0), 0.05).unwrap();
        let m = monodromy_matrix(&eq, &basis, &lp, TOL).unwrap();
        let exp2 = (C64::new(0.0, std::f64::consts::TAU) * basis[1].exponent()).exp();
        let scale = exp2.norm().max(1.0);
        assert!(m.0[0][1].norm() < 1e-9 * scale && m.0[1][0].norm() < 1e-9 * scale, "{m:?}");
        assert!((m.0[0][0] - 1.0).norm() < 1e-9);
        assert!((m.0[1][1] - exp2).norm() < 1e-9 * exp2.norm().max(1.0));
    }
}

#[test]
fn step_limit_from_options() {
    use heun_core::continuation::{continue_with_report, ContinuationOptions};
    use heun_core::HeunError;
    let eq = equations(29, 1).remove(0);
    let s = StatePair::new(c(0.3, 0.3), c(1.0, 0.0), c(0.0, 0.0));
    let path = ContinuationPath::straight(&eq, s.z, c(2.0, 2.0), 0.1).unwrap();
    let opts = ContinuationOptions::new(1e-12).with_max_steps(5);
    assert!(matches!(continue_with_report(&eq, s, &path, &opts), Err(HeunError::StepLimitExceeded(5))));
}
