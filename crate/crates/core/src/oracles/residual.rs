//! Scale-free ODE residuals written directly from the two displayed equations.

use std::f64::consts::PI;

use crate::error::{HeunError, Result};
use crate::numeric::C64;
use crate::params::EquationParams;

/// `|h'' + P h' + Q h| / max(|h''|, |P h'|, |Q h|)` for the general or
/// confluent equation at a non-singular `z`.
pub fn ode_residual(eq: &EquationParams, z: C64, h: C64, hp: C64, hpp: C64) -> Result<f64> {
    let (p, q) = match eq {
        EquationParams::General(g) => {
            let a = g.a();
            if z == C64::default() || z == C64::new(1.0, 0.0) || z == a {
                return Err(HeunError::AtSingularity);
            }
            let p = g.gamma() / z + g.delta() / (z - 1.0) + g.epsilon() / (z - a);
            let q = (g.alpha() * g.beta() * z - g.q()) / (z * (z - 1.0) * (z - a));
            (p, q)
        }
        EquationParams::Confluent(c) => {
            if z == C64::default() || z == C64::new(1.0, 0.0) {
                return Err(HeunError::AtSingularity);
            }
            let p = c.alpha + (c.beta + 1.0) / z + (c.gamma + 1.0) / (z - 1.0);
            let q = c.mu / z + c.nu / (z - 1.0);
            (p, q)
        }
    };
    let terms = [hpp, p * hp, q * h];
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((terms[0] + terms[1] + terms[2]).norm() / scale)
}

/// `f'(z)` from Cauchy's integral formula on a circle of radius `r` with `n`
/// trapezoid nodes (spectrally accurate for analytic `f`).
pub fn cauchy_derivative<F: FnMut(C64) -> C64>(mut f: F, z: C64, r: f64, n: usize) -> C64 {
    let mut acc = C64::default();
    for k in 0..n {
        let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        acc += f(z + e * r) / e;
    }
    acc / (n as f64 * r)
}
