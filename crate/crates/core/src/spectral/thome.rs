//! Formal (Thomé) solutions of the confluent equation at its irregular point.
//!
//! Power-law family: `H ~ z^λ Σ b_m z^{-m}` with `λ = -(μ+ν)/α` and
//! `α m b_m = [(λ-m+1)(λ-m) + (β+γ+2-α)(λ-m+1) - μ] b_{m-1} - (λ-m+2)(λ-m+2+β) b_{m-2}`.
//! Exponential family: `H = e^{-αz} G` with `G` of power-law type for the
//! twin parameters (see [`ConfluentParams::exponential_twin`]).

use serde::{Deserialize, Serialize};

use crate::error::{HeunError, Result};
use crate::numeric::{cserde, cvec_serde, CompensatedSum, C64, ONE, ZERO};
use crate::params::ConfluentParams;

/// Hard cap on the truncation index.
pub const MAX_TERMS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThomeKind {
    /// No exponential factor; recessive in the sectors used for outgoing waves.
    Recessive,
    /// Carries `e^{-αz}`.
    Dominant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThomeExpansion {
    pub kind: ThomeKind,
    /// `(λ, c)` in `z^λ e^{cz}`.
    #[serde(with = "cserde")]
    pub power: C64,
    #[serde(with = "cserde")]
    pub exp_coeff: C64,
    #[serde(with = "cvec_serde")]
    pub coeffs: Vec<C64>,
}

/// Value, derivative and the truncation data of one asymptotic evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticValue {
    pub value: C64,
    pub derivative: C64,
    /// Terms summed (smallest-term rule).
    pub terms: usize,
    /// Magnitude of the smallest term relative to the sum.
    pub rel_error: f64,
}

impl ThomeExpansion {
    pub fn new(params: &ConfluentParams, kind: ThomeKind) -> Result<Self> {
        let p = match kind {
            ThomeKind::Recessive => *params,
            ThomeKind::Dominant => params.exponential_twin(),
        };
        if p.alpha == ZERO {
            return Err(HeunError::InvalidInput("alpha = 0: infinity is not irregular of rank one".into()));
        }
        let lambda = -(p.mu + p.nu) / p.alpha;
        let lin = p.beta + p.gamma + 2.0 - p.alpha;
        let mut b = vec![ONE];
        for m in 1..=MAX_TERMS {
            let mf = m as f64;
            let x = lambda - mf;
            let mut num = ((x + 1.0) * x + lin * (x + 1.0) - p.mu) * b[m - 1];
            if m >= 2 {
                num -= (x + 2.0) * (x + 2.0 + p.beta) * b[m - 2];
            }
            b.push(num / (p.alpha * mf));
        }
        Ok(ThomeExpansion {
            kind,
            power: lambda,
            exp_coeff: if kind == ThomeKind::Dominant { -params.alpha } else { ZERO },
            coeffs: b,
        })
    }

    /// Sums up to (not including) the smallest term, the standard optimal
    /// truncation of a divergent asymptotic series.
    pub fn eval(&self, z: C64) -> AsymptoticValue {
        let inv = ONE / z;
        let mags: Vec<f64> = {
            let mut p = ONE;
            self.coeffs
                .iter()
                .map(|b| {
                    let m = (b * p).norm();
                    p *= inv;
                    m
                })
                .collect()
        };
        let (k_min, smallest) = mags
            .iter()
            .enumerate()
            .skip(1)
            .fold((1, f64::INFINITY), |acc, (k, &m)| if m < acc.1 { (k, m) } else { acc });
        let mut s = CompensatedSum::new();
        let mut ds = CompensatedSum::new();
        let mut p = ONE;
        for (m, b) in self.coeffs.iter().enumerate().take(k_min) {
            s.add(b * p);
            ds.add(-(m as f64) * b * p * inv);
            p *= inv;
        }
        let (sum, dsum) = (s.value(), ds.value());
        let pre = (self.power * z.ln() + self.exp_coeff * z).exp();
        let value = pre * sum;
        let derivative = pre * (dsum + (self.power * inv + self.exp_coeff) * sum);
        AsymptoticValue {
            value,
            derivative,
            terms: k_min,
            rel_error: smallest / sum.norm(),
        }
    }
}
