//! Regge-Wheeler equation in `z = r/2M` and its reduction to the confluent
//! Heun equation.
//!
//! With `Ω = 2Mω` and `f = 1 - 1/z` the radial equation reads
//! `Ψ'' + Ψ'/(z(z-1)) + [Ω² z²/(z-1)² - (ℓ(ℓ+1) z + 1 - s²)/(z²(z-1))] Ψ = 0`.
//! Peeling `Ψ = z^{1+s} (z-1)^{-iΩ} e^{iΩz} H` (regular at the origin side,
//! ingoing at the horizon, outgoing at infinity for `e^{-iωt}`) leaves `H`
//! in confluent form with
//! `α = 2iΩ, β = 2s, γ = -2iΩ,`
//! `μ = ℓ(ℓ+1) + 4iΩs + 2iΩ - s² - s, ν = -ℓ(ℓ+1) + 4Ω² - 2iΩs + s² + s`.

use serde::{Deserialize, Serialize};

use crate::error::{HeunError, Result};
use crate::frobenius::{confluent_series, Branch, SingularPoint, DEFAULT_TERMS};
use crate::numeric::{cserde, C64, I};
use crate::params::ConfluentParams;

use super::RWProblem;

/// Residual bound for the transformation self-check.
pub const TRANSFORM_RESIDUAL_BOUND: f64 = 1e-9;

/// The exponents peeled off in `Ψ = z^{σ0} (z-1)^{σ1} e^{κz} H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwTransform {
    /// `2Mω`.
    #[serde(with = "cserde")]
    pub omega2m: C64,
    #[serde(with = "cserde")]
    pub sigma0: C64,
    #[serde(with = "cserde")]
    pub sigma1: C64,
    #[serde(with = "cserde")]
    pub kappa: C64,
}

impl RwTransform {
    /// `g'/g` and `g''/g` for the prefactor `g`.
    pub fn log_derivatives(&self, z: C64) -> (C64, C64) {
        let l = self.sigma0 / z + self.sigma1 / (z - 1.0) + self.kappa;
        let lp = -self.sigma0 / (z * z) - self.sigma1 / ((z - 1.0) * (z - 1.0));
        (l, lp + l * l)
    }

    /// Characteristic exponents of `Ψ` at the horizon, ingoing first.
    pub fn horizon_exponents(&self) -> [C64; 2] {
        [self.sigma1, -self.sigma1]
    }
}

pub fn rw_to_confluent(prob: &RWProblem, omega: C64) -> Result<(ConfluentParams, RwTransform)> {
    if omega == C64::default() {
        return Err(HeunError::InvalidInput("omega must be non-zero".into()));
    }
    let w = 2.0 * prob.mass() * omega;
    let s = prob.s() as f64;
    let lam = prob.ell() as f64 * (prob.ell() as f64 + 1.0);
    let iw = I * w;
    let params = ConfluentParams::new(
        2.0 * iw,
        C64::new(2.0 * s, 0.0),
        -2.0 * iw,
        lam + 4.0 * iw * s + 2.0 * iw - s * s - s,
        -lam + 4.0 * w * w - 2.0 * iw * s + s * s + s,
    )?;
    let t = RwTransform {
        omega2m: w,
        sigma0: C64::new(1.0 + s, 0.0),
        sigma1: -iw,
        kappa: iw,
    };
    Ok((params, t))
}

/// Regge-Wheeler residual `|Ψ'' + PΨ' + QΨ| / max term` in the `z` variable,
/// written independently of the confluent form.
pub fn rw_residual(prob: &RWProblem, omega2m: C64, z: C64, psi: C64, dpsi: C64, d2psi: C64) -> f64 {
    let (terms, scale) = rw_terms(prob, omega2m, z, psi, dpsi, d2psi);
    (terms[0] + terms[1] + terms[2]).norm() / scale
}

fn rw_terms(prob: &RWProblem, omega2m: C64, z: C64, psi: C64, dpsi: C64, d2psi: C64) -> ([C64; 3], f64) {
    let s = prob.s() as f64;
    let lam = prob.ell() as f64 * (prob.ell() as f64 + 1.0);
    let p = 1.0 / (z * (z - 1.0));
    let q = omega2m * omega2m * z * z / ((z - 1.0) * (z - 1.0)) - (lam * z + 1.0 - s * s) / (z * z * (z - 1.0));
    let terms = [d2psi, p * dpsi, q * psi];
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    (terms, scale)
}

/// [`rw_to_confluent`] followed by a self-check: a local confluent solution
/// is evaluated at 20 points, mapped back through the prefactor, and the
/// Regge-Wheeler residual must stay below [`TRANSFORM_RESIDUAL_BOUND`].
pub fn rw_to_confluent_checked(prob: &RWProblem, omega: C64) -> Result<(ConfluentParams, RwTransform)> {
    let (params, t) = rw_to_confluent(prob, omega)?;
    let sol = confluent_series(&params, SingularPoint::Zero, Branch::First, DEFAULT_TERMS)?;
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        // deterministic spread over the annulus 0.2 < |z| < 0.7
        let r = 0.2 + 0.5 * ((k as f64 * 0.618_033_988_749_895) % 1.0);
        let th = 2.399_963_229_728_653 * k as f64 + 0.3;
        let z = C64::from_polar(r, th);
        let (e, hpp) = sol.eval_with_second(z, 1e-15)?;
        let (l, l2) = t.log_derivatives(z);
        let g = (t.sigma0 * z.ln() + t.sigma1 * (z - 1.0).ln() + t.kappa * z).exp();
        let psi = g * e.value;
        let dpsi = g * (e.derivative + l * e.value);
        let parts = [hpp, 2.0 * l * e.derivative, l2 * e.value];
        let d2psi = g * (parts[0] + parts[1] + parts[2]);
        // Ψ'' is assembled from pieces that may cancel; their size sets the scale
        let (terms, scale) = rw_terms(prob, t.omega2m, z, psi, dpsi, d2psi);
        let scale = parts.iter().map(|v| (g * v).norm()).fold(scale, f64::max);
        worst = worst.max((terms[0] + terms[1] + terms[2]).norm() / scale);
    }
    if !(worst <= TRANSFORM_RESIDUAL_BOUND) {
        return Err(HeunError::DerivationInconsistent(worst));
    }
    Ok((params, t))
}
