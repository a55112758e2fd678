//! Continued-fraction quasinormal modes of the Schwarzschild Regge-Wheeler
//! equation (units 2M = 1 internally).
//!
//! Recurrence `α_k a_{k+1} + β_k a_k + γ_k a_{k-1} = 0` with `ρ = -iω`:
//! `α_k = k² + (2ρ+2)k + 2ρ + 1`,
//! `β_k = -[2k² + (8ρ+2)k + 8ρ² + 4ρ + ℓ(ℓ+1) - s² + 1]`,
//! `γ_k = k² + 4ρk + 4ρ² - s²`.
//! The n-th overtone is taken as the root of the n-th inversion of the
//! continued fraction.

use crate::error::{HeunError, Result};
use crate::numeric::C64;

pub const LEAVER_MIN_DEPTH: usize = 100;
const DOUBLING_TOL: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 6;

/// n-th inversion of the continued fraction at `omega2m = 2Mω`.
pub fn leaver_continued_fraction(omega2m: C64, ell: u32, s: i32, n: usize, depth: usize) -> C64 {
    let rho = -C64::i() * omega2m;
    let lam = (ell * (ell + 1)) as f64;
    let s2 = (s * s) as f64;
    let alpha = |k: f64| k * k + (2.0 * rho + 2.0) * k + 2.0 * rho + 1.0;
    let beta = |k: f64| -(2.0 * k * k + (8.0 * rho + 2.0) * k + 8.0 * rho * rho + 4.0 * rho + lam - s2 + 1.0);
    let gamma = |k: f64| k * k + 4.0 * rho * k + 4.0 * rho * rho - s2;

    let mut down = C64::default();
    for k in (n + 1..=depth.max(n + 1)).rev() {
        let kf = k as f64;
        down = alpha(kf - 1.0) * gamma(kf) / (beta(kf) - down);
    }
    let mut up = C64::default();
    for k in 1..=n {
        let kf = k as f64;
        up = alpha(kf - 1.0) * gamma(kf) / (beta(kf - 1.0) - up);
    }
    beta(n as f64) - up - down
}

fn secant<F: Fn(C64) -> C64>(f: F, x0: C64, x1: C64, max_iter: usize) -> Option<C64> {
    let (mut a, mut b) = (x0, x1);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..max_iter {
        if fb == fa {
            return Some(b);
        }
        let c = b - fb * (b - a) / (fb - fa);
        if !(c.re.is_finite() && c.im.is_finite()) {
            return None;
        }
        if (c - b).norm() < 1e-14 * c.norm().max(1.0) {
            return Some(c);
        }
        a = b;
        fa = fb;
        b = c;
        fb = f(b);
    }
    None
}

/// Seed from the eikonal estimate, refined by the minimum of `|f|` on a
/// coarse grid around it (the continued fraction is meromorphic; plain
/// secant from a distant seed can lock onto a neighbouring overtone).
fn seed(ell: u32, n: usize, s: i32, depth: usize) -> C64 {
    let r = 27f64.sqrt();
    let eik = C64::new(2.0 * (ell as f64 + 0.5) / r, -2.0 * (n as f64 + 0.5) / r);
    let (re_lo, re_hi) = (0.5 * eik.re, 1.05 * eik.re);
    let (im_lo, im_hi) = (2.0 * eik.im - 0.1, 0.5 * eik.im);
    let m = 40;
    let mut best = (f64::INFINITY, eik);
    for i in 0..=m {
        for j in 0..=m {
            let w = C64::new(
                re_lo + (re_hi - re_lo) * i as f64 / m as f64,
                im_lo + (im_hi - im_lo) * j as f64 / m as f64,
            );
            let v = leaver_continued_fraction(w, ell, s, n, depth).norm();
            if v < best.0 {
                best = (v, w);
            }
        }
    }
    best.1
}

fn root_at_depth(start: C64, ell: u32, s: i32, n: usize, depth: usize) -> Option<C64> {
    let f = |w: C64| leaver_continued_fraction(w, ell, s, n, depth);
    secant(f, start, start * C64::new(1.0 + 1e-4, 1e-4), 200)
}

/// Quasinormal frequency ω (units of 1/length, G = c = 1) of overtone `n`
/// for mass `mass`. The depth is doubled until the root moves by less than
/// 1e-8 (in units of 1/M).
pub fn leaver_qnm(mass: f64, ell: u32, s: i32, n: usize, depth: usize) -> Result<C64> {
    if !(mass > 0.0) || (ell as i32) < s.abs() || depth < LEAVER_MIN_DEPTH {
        return Err(HeunError::InvalidInput(format!(
            "leaver oracle needs M > 0, ell >= |s|, depth >= {LEAVER_MIN_DEPTH}"
        )));
    }
    let mut depth = depth;
    let start = seed(ell, n, s, depth);
    let mut prev = root_at_depth(start, ell, s, n, depth)
        .ok_or_else(|| HeunError::OracleNotConverged(format!("no root near {start}")))?;
    for _ in 0..MAX_DOUBLINGS {
        depth *= 2;
        let next = root_at_depth(prev, ell, s, n, depth)
            .ok_or_else(|| HeunError::OracleNotConverged(format!("lost root at depth {depth}")))?;
        // 2Mω / 2 = Mω
        if ((next - prev) / 2.0).norm() <= DOUBLING_TOL {
            return Ok(next / (2.0 * mass));
        }
        prev = next;
    }
    Err(HeunError::OracleNotConverged("depth doubling did not settle".into()))
}
