//! Independent reference implementations used by tests, the acceptance suite
//! and the CLI's `--oracle` diagnostics. Nothing in here is called by the
//! production modules, and nothing in here calls them: the oracles read
//! parameter records and otherwise carry their own series, integrators and
//! root finders, so agreement between the two sides is evidence.
//!
//! Trust chain of the Leaver oracle: no published spectrum is used as ground
//! truth. Its correctness rests on depth-doubling self-convergence, exact
//! mass-scaling covariance and overtone ordering.

mod gamma;
mod hyp2f1;
mod leaver;
mod residual;

pub use gamma::complex_gamma;
pub use hyp2f1::{gauss_2f1, Hyp2F1Ode};
pub use leaver::{leaver_continued_fraction, leaver_qnm, LEAVER_MIN_DEPTH};
pub use residual::{cauchy_derivative, ode_residual};

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::numeric::{cvec_serde, C64};

/// Outcome of one oracle run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub inputs_digest: String,
    #[serde(with = "cvec_serde")]
    pub values: Vec<C64>,
    pub convergence_metric: f64,
    pub threshold: f64,
    /// False when the convergence metric exceeds the oracle's threshold.
    pub conclusive: bool,
}

impl OracleReport {
    pub fn new(name: &str, inputs: &str, values: Vec<C64>, convergence_metric: f64, threshold: f64) -> Self {
        let mut hasher = DefaultHasher::new();
        inputs.hash(&mut hasher);
        OracleReport {
            name: name.to_string(),
            inputs_digest: format!("{:016x}", hasher.finish()),
            values,
            convergence_metric,
            threshold,
            conclusive: convergence_metric <= threshold,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_marks_inconclusive() {
        let r = OracleReport::new("x", "inputs", vec![], 1e-6, 1e-8);
        assert!(!r.conclusive);
        assert_eq!(r.inputs_digest.len(), 16);
        let r2 = OracleReport::new("x", "inputs", vec![], 1e-9, 1e-8);
        assert!(r2.conclusive);
        assert_eq!(r.inputs_digest, r2.inputs_digest);
    }
}
