#![allow(dead_code)]

use heun_core::continuation::{continue_along_path, ContinuationPath, StatePair};
use heun_core::oracles::{cauchy_derivative, ode_residual};
use heun_core::{ConfluentParams, EquationParams, HeunParams, Result, C64};
use rand::Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn disc<R: Rng>(rng: &mut R, r: f64) -> C64 {
    let rad = r * rng.gen::<f64>().sqrt();
    C64::from_polar(rad, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Real part in `lo..hi`, imaginary part in `-im..im`.
pub fn boxed<R: Rng>(rng: &mut R, lo: f64, hi: f64, im: f64) -> C64 {
    c(rng.gen_range(lo..hi), rng.gen_range(-im..im))
}

/// Exponent parameter kept at least 0.15 away from every integer.
pub fn non_integer<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> C64 {
    loop {
        let g = boxed(rng, lo, hi, 0.4);
        let d = C64::new(g.re - g.re.round(), g.im).norm();
        if d > 0.15 {
            return g;
        }
    }
}

/// `a` in the annulus `1.6 < |a| < 3`, away from the real segment `[0, 1]`.
pub fn singular_a<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(rng.gen_range(1.6..3.0), rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn general<R: Rng>(rng: &mut R) -> HeunParams {
    HeunParams::new(
        singular_a(rng),
        disc(rng, 1.5),
        disc(rng, 1.5),
        disc(rng, 1.5),
        non_integer(rng, 0.2, 2.5),
        disc(rng, 1.0),
    )
    .unwrap()
}

/// General parameters with non-integer exponent differences at 0, 1 and `a`.
pub fn general_generic<R: Rng>(rng: &mut R) -> HeunParams {
    loop {
        let p = general(rng);
        let far = |e: C64| C64::new(e.re - e.re.round(), e.im).norm() > 0.1;
        if far(p.gamma()) && far(p.delta()) && far(p.epsilon()) {
            return p;
        }
    }
}

pub fn confluent<R: Rng>(rng: &mut R) -> ConfluentParams {
    ConfluentParams::new(disc(rng, 1.5), non_integer(rng, -0.8, 2.0), non_integer(rng, -0.8, 2.0), disc(rng, 1.5), disc(rng, 1.5)).unwrap()
}

/// Normalized residual of a continued state: `h''` comes from a Cauchy
/// integral of `h'` over a small circle whose points are reached by
/// continuing a little further, so the governing equation is not used.
pub fn continued_residual(eq: &EquationParams, s: &StatePair, tol: f64) -> Result<f64> {
    let r = 0.02;
    let mut err = None;
    let hpp = cauchy_derivative(
        |z| {
            let p = ContinuationPath::new(vec![s.z, z], 1e-3).unwrap();
            match continue_along_path(eq, *s, &p, tol) {
                Ok(e) => e.hp,
                Err(e) => {
                    err = Some(e);
                    C64::default()
                }
            }
        },
        s.z,
        r,
        24,
    );
    if let Some(e) = err {
        return Err(e);
    }
    ode_residual(eq, s.z, s.h, s.hp, hpp)
}
