mod common;

use common::*;
use heun_core::frobenius::{confluent_series, general_series, Branch, SingularPoint, DEFAULT_TERMS};
use heun_core::oracles::ode_residual;
use heun_core::{ConfluentParams, EquationParams, HeunParams, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn cplx(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

fn away_from_int(g: C64) -> bool {
    C64::new(g.re - g.re.round(), g.im).norm() > 0.1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hypergeometric_coefficients(al in cplx(2.0), be in cplx(2.0), ga in cplx(2.5), a in cplx(3.0)) {
        prop_assume!(away_from_int(ga) && a.norm() > 1.2);
        let p = HeunParams::new(a, a * al * be, al, be, ga, C64::default()).unwrap();
        let s = general_series(&p, SingularPoint::Zero, Branch::First, 50).unwrap();
        let mut t = C64::new(1.0, 0.0);
        for k in 0..50 {
            let got = s.coeffs()[k];
            prop_assert!((got - t).norm() <= 1e-13 * t.norm().max(1.0), "k = {} {} {}", k, got, t);
            let kf = k as f64;
            t = t * (al + kf) * (be + kf) / ((ga + kf) * (kf + 1.0));
        }
    }

    #[test]
    fn confluent_series_satisfies_equation(al in cplx(1.5), be in cplx(2.0), ga in cplx(2.0), mu in cplx(1.5), nu in cplx(1.5),
                                           r in 0.05f64..0.85, th in 0.0f64..TAU, second in any::<bool>(), at_one in any::<bool>()) {
        let p = ConfluentParams::new(al, be, ga, mu, nu).unwrap();
        let point = if at_one { SingularPoint::One } else { SingularPoint::Zero };
        let branch = if second { Branch::Second } else { Branch::First };
        let Ok(sol) = confluent_series(&p, point, branch, DEFAULT_TERMS) else { return Ok(()) };
        let z = sol.expansion_point() + C64::from_polar(r, th);
        let (e, hpp) = sol.eval_with_second(z, 1e-15).unwrap();
        let res = ode_residual(&EquationParams::Confluent(p), z, e.value, e.derivative, hpp).unwrap();
        prop_assert!(res < 1e-9, "residual {}", res);
    }

    #[test]
    fn tighter_tolerance_is_consistent(seed in any::<u64>(), r in 0.05f64..0.8, th in 0.0f64..TAU) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = general(&mut rng);
        let sol = general_series(&p, SingularPoint::Zero, Branch::First, DEFAULT_TERMS).unwrap();
        let z = C64::from_polar(r * sol.radius(), th);
        let tol = 1e-8;
        let a = sol.eval_series(z, tol).unwrap();
        let b = sol.eval_series(z, tol / 100.0).unwrap();
        prop_assert!((a.value - b.value).norm() <= a.est_error.max(tol * b.value.norm()) * 1.0001);
        prop_assert!(b.n_terms_used >= a.n_terms_used);
    }
}

#[test]
fn series_centre_is_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = general(&mut rng);
        for pt in [SingularPoint::Zero, SingularPoint::One, SingularPoint::A] {
            let s = general_series(&p, pt, Branch::First, 20).unwrap();
            let e = s.eval_series(s.expansion_point(), 1e-15).unwrap();
            assert_eq!(e.value, C64::new(1.0, 0.0));
        }
    }
}

#[test]
fn local_parameter_maps_preserve_exponents() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let p = general(&mut rng);
        // exponents at 1 are {0, 1 - δ}; about_one moves them to the origin
        assert!((p.about_one().gamma() - p.delta()).norm() < 1e-15);
        assert!((p.about_a().gamma() - p.epsilon()).norm() < 1e-15);
        assert!((p.about_one().about_one().q() - p.q()).norm() < 1e-12);
        let q = confluent(&mut rng);
        assert_eq!(q.about_one().about_one(), q);
    }
}
