//! Continuation of local solutions along explicit polygonal paths.
//!
//! The first-order system `(h, h')` is integrated segment by segment with an
//! embedded 8(5,3) Runge-Kutta pair; `h''` is eliminated through the
//! governing equation. The path itself is the branch specification.

mod dop853;
mod path;

pub use path::ContinuationPath;

use serde::{Deserialize, Serialize};

use crate::error::{HeunError, Result};
use crate::frobenius::FrobeniusSolution;
use crate::numeric::{cserde, is_finite, Mat2, C64, ZERO};
use crate::params::Equation;

/// Default cap on accepted + rejected steps per path.
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;
/// Fraction of the convergence radius at which continuations are seeded.
pub const SEED_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatePair {
    #[serde(with = "cserde")]
    pub z: C64,
    #[serde(with = "cserde")]
    pub h: C64,
    #[serde(with = "cserde")]
    pub hp: C64,
}

impl StatePair {
    pub fn new(z: C64, h: C64, hp: C64) -> Self {
        StatePair { z, h, hp }
    }

    pub fn scaled(&self, k: C64) -> StatePair {
        StatePair { z: self.z, h: self.h * k, hp: self.hp * k }
    }

    /// Euclidean norm of `(h, h')`.
    pub fn magnitude(&self) -> f64 {
        (self.h.norm_sqr() + self.hp.norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        is_finite(self.h) && is_finite(self.hp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    /// Local error tolerance per step (mixed absolute/relative).
    pub tol: f64,
    pub max_steps: usize,
}

impl ContinuationOptions {
    pub fn new(tol: f64) -> Self {
        ContinuationOptions { tol, max_steps: DEFAULT_MAX_STEPS }
    }

    pub fn with_max_steps(self, max_steps: usize) -> Self {
        ContinuationOptions { max_steps, ..self }
    }
}

/// Diagnostics of one continuation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ContinuationReport {
    pub steps: usize,
    pub rejected: usize,
    /// Accumulated local error estimate relative to `1 + |state|`.
    pub err_estimate: f64,
}

impl ContinuationReport {
    fn absorb(&mut self, other: &ContinuationReport) {
        self.steps += other.steps;
        self.rejected += other.rejected;
        self.err_estimate += other.err_estimate;
    }
}

/// State at the last waypoint, continuing `start` along `path`.
pub fn continue_along_path<E: Equation + ?Sized>(
    eq: &E,
    start: StatePair,
    path: &ContinuationPath,
    tol: f64,
) -> Result<StatePair> {
    continue_with_report(eq, start, path, &ContinuationOptions::new(tol)).map(|(s, _)| s)
}

pub fn continue_with_report<E: Equation + ?Sized>(
    eq: &E,
    start: StatePair,
    path: &ContinuationPath,
    opts: &ContinuationOptions,
) -> Result<(StatePair, ContinuationReport)> {
    if start.z != path.start() {
        return Err(HeunError::InvalidPath(format!(
            "start state at {} but path starts at {}",
            start.z,
            path.start()
        )));
    }
    path.validate_for(eq)?;
    let mut report = ContinuationReport::default();
    if path.is_degenerate() {
        return Ok((start, report));
    }
    let mut y = [start.h, start.hp];
    for seg in path.waypoints().windows(2) {
        let (z0, dz) = (seg[0], seg[1] - seg[0]);
        let rhs = |t: f64, s: &[C64; 2]| {
            let z = z0 + dz * t;
            [dz * s[1], dz * eq.second_derivative(z, s[0], s[1])]
        };
        let budget = opts.max_steps.saturating_sub(report.steps + report.rejected);
        let (y_end, stats) = dop853::integrate_unit(rhs, y, opts.tol, budget, opts.max_steps)?;
        y = y_end;
        report.absorb(&ContinuationReport {
            steps: stats.steps,
            rejected: stats.rejected,
            err_estimate: stats.local_error_sum * opts.tol,
        });
    }
    let end = StatePair::new(path.end(), y[0], y[1]);
    if !end.is_finite() {
        return Err(HeunError::SingularityTooClose {
            point: "overflow during continuation".into(),
            distance: 0.0,
            clearance: path.clearance(),
        });
    }
    Ok((end, report))
}

/// `∫ p(z) dz` along the path, with the logarithms of every singular factor
/// followed continuously (exact for the closed-form Abel weight).
pub fn integral_of_p<E: Equation + ?Sized>(eq: &E, path: &ContinuationPath) -> C64 {
    let (lin, factors) = eq.abel_exponents();
    let mut total = lin * (path.end() - path.start());
    for (s, e) in factors {
        let mut dlog = ZERO;
        for w in path.waypoints().windows(2) {
            // a straight segment that avoids s changes arg(z - s) by less than π
            dlog += ((w[1] - s) / (w[0] - s)).ln();
        }
        total += e * dlog;
    }
    total
}

/// State of a Frobenius solution at `z` (must lie inside its evaluation disc).
pub fn series_state(sol: &FrobeniusSolution, z: C64, tol: f64) -> Result<StatePair> {
    let e = sol.eval_series(z, tol)?;
    Ok(StatePair::new(z, e.value, e.derivative))
}

/// Seed point `0.5·radius` from the expansion point in direction `dir`.
pub fn seed_point(sol: &FrobeniusSolution, dir: C64) -> C64 {
    sol.seed_point(SEED_FRACTION, dir)
}

/// Monodromy matrix and its Abel-identity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monodromy {
    pub matrix: Mat2,
    /// `exp(-∮ p dz)`, the determinant predicted by Abel's identity.
    #[serde(with = "cserde")]
    pub abel_det: C64,
    /// `|det M - abel_det|`.
    pub abel_mismatch: f64,
    pub report: ContinuationReport,
}

/// `M` with `continue(Y) = Y·M`, `Y` the row `(y1, y2)` of the basis.
pub fn monodromy_matrix<E: Equation + ?Sized>(
    eq: &E,
    basis: &[FrobeniusSolution; 2],
    loop_path: &ContinuationPath,
    tol: f64,
) -> Result<Mat2> {
    monodromy_with_report(eq, basis, loop_path, &ContinuationOptions::new(tol)).map(|m| m.matrix)
}

pub fn monodromy_with_report<E: Equation + ?Sized>(
    eq: &E,
    basis: &[FrobeniusSolution; 2],
    loop_path: &ContinuationPath,
    opts: &ContinuationOptions,
) -> Result<Monodromy> {
    if !loop_path.is_closed() {
        return Err(HeunError::InvalidPath("monodromy loop is not closed".into()));
    }
    let base = loop_path.start();
    let series_tol = 1e-15;
    let s0 = series_state(&basis[0], base, series_tol)?;
    let s1 = series_state(&basis[1], base, series_tol)?;
    let y0 = Mat2::from_columns([s0.h, s0.hp], [s1.h, s1.hp]);
    let w = y0.det();
    if w.norm() <= 1e-12 * s0.magnitude() * s1.magnitude() {
        return Err(HeunError::DegenerateBasis(w.norm()));
    }
    let (e0, r0) = continue_with_report(eq, s0, loop_path, opts)?;
    let (e1, r1) = continue_with_report(eq, s1, loop_path, opts)?;
    let y1 = Mat2::from_columns([e0.h, e0.hp], [e1.h, e1.hp]);
    let matrix = y0.inverse().ok_or(HeunError::DegenerateBasis(w.norm()))?.mul(&y1);
    let abel_det = (-integral_of_p(eq, loop_path)).exp();
    let mut report = r0;
    report.absorb(&r1);
    Ok(Monodromy {
        matrix,
        abel_det,
        abel_mismatch: (matrix.det() - abel_det).norm(),
        report,
    })
}
