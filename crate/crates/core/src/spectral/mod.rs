//! Two-point eigenproblems for the confluent equation: Schwarzschild
//! quasinormal modes with an optional reflecting surface.
//!
//! The radial coordinate is `z = r/2M`. Both boundary solutions are carried
//! to a common matching point `z_m` (default 5, i.e. `r = 10M`); a mode is a
//! zero of their normalized Wronskian.

mod roots;
mod rw;
mod thome;

pub use roots::{find_modes, find_modes_with, winding_number, GridScan, Mode, ModeSearch, Region, SearchDiagnostics, SearchOptions};
pub use rw::{rw_residual, rw_to_confluent, rw_to_confluent_checked, RwTransform, TRANSFORM_RESIDUAL_BOUND};
pub use thome::{AsymptoticValue, ThomeExpansion, ThomeKind, MAX_TERMS};

use serde::{Deserialize, Serialize};

use crate::connection::wronskian;
use crate::continuation::{continue_with_report, series_state, ContinuationOptions, ContinuationPath, ContinuationReport, StatePair, DEFAULT_MAX_STEPS};
use crate::error::{HeunError, Result};
use crate::frobenius::{confluent_series, Branch, SingularPoint, DEFAULT_TERMS, DISC_FRACTION};
use crate::numeric::{cserde, C64, ONE};
use crate::params::ConfluentParams;

/// Default matching point in `z`.
pub const DEFAULT_MATCH: f64 = 5.0;
/// Largest radius tried for the asymptotic seed.
pub const R_MAX: f64 = 50.0;
const R_START: f64 = 10.0;
const R_GROWTH: f64 = 1.25;
/// The seed ray keeps this far from the negative real axis.
const RAY_MARGIN: f64 = 0.35;
/// Where the horizon branch is seeded, `z = 1 + HORIZON_SEED`.
const HORIZON_SEED: f64 = 0.5;
/// Relative accuracy floor for the asymptotic seed.
const THOME_FLOOR: f64 = 1e-14;

/// Inner boundary of the scattering problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    Horizon,
    /// Areal radius of a reflecting surface, `r > 2M`.
    Radius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem")]
pub struct RWProblem {
    mass: f64,
    ell: u32,
    s: i32,
    #[serde(with = "cserde")]
    rho: C64,
    surface: Surface,
}

#[derive(Deserialize)]
struct RawProblem {
    mass: f64,
    ell: u32,
    s: i32,
    #[serde(with = "cserde")]
    rho: C64,
    surface: Surface,
}

impl TryFrom<RawProblem> for RWProblem {
    type Error = HeunError;

    fn try_from(r: RawProblem) -> Result<Self> {
        RWProblem::new(r.mass, r.ell, r.s, r.rho, r.surface)
    }
}

impl RWProblem {
    pub fn new(mass: f64, ell: u32, s: i32, rho: C64, surface: Surface) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(HeunError::InvalidInput(format!("mass must be positive, got {mass}")));
        }
        if ell < 2 || (ell as i64) < (s as i64).abs() {
            return Err(HeunError::InvalidInput(format!("need ell >= 2 and ell >= |s|, got ell = {ell}, s = {s}")));
        }
        if !(rho.norm() <= 1.0) {
            return Err(HeunError::InvalidInput(format!("|rho| must not exceed 1, got {}", rho.norm())));
        }
        if let Surface::Radius(r) = surface {
            if !(r.is_finite() && r > 2.0 * mass) {
                return Err(HeunError::InvalidInput(format!("surface radius {r} must exceed 2M = {}", 2.0 * mass)));
            }
        }
        Ok(RWProblem { mass, ell, s, rho, surface })
    }

    /// Black hole (`ρ = 0`, horizon boundary).
    pub fn black_hole(mass: f64, ell: u32, s: i32) -> Result<Self> {
        Self::new(mass, ell, s, C64::new(0.0, 0.0), Surface::Horizon)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn s(&self) -> i32 {
        self.s
    }

    pub fn rho(&self) -> C64 {
        self.rho
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        let surface = match self.surface {
            Surface::Radius(r) => Surface::Radius(r * mass / self.mass),
            h => h,
        };
        Self::new(mass, self.ell, self.s, self.rho, surface)
    }

    pub fn with_rho(&self, rho: C64) -> Result<Self> {
        Self::new(self.mass, self.ell, self.s, rho, self.surface)
    }

    /// Inner boundary condition for the confluent function.
    pub fn inner_condition(&self) -> BoundaryCondition {
        if self.rho == C64::new(0.0, 0.0) {
            return BoundaryCondition::ExponentBranch(Branch::First);
        }
        let z_surface = match self.surface {
            Surface::Radius(r) => r / (2.0 * self.mass),
            Surface::Horizon => 1.0 + HORIZON_SEED,
        };
        BoundaryCondition::Mixed { rho: self.rho, z_surface }
    }
}

/// Boundary conditions understood by [`boundary_solution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// The power-law Thomé solution at infinity (purely outgoing waves).
    RecessiveAtInfinity,
    /// A Frobenius branch at `z = 1`; `First` is the ingoing one.
    ExponentBranch(Branch),
    /// `φ_in/φ_in(z_s) + ρ·φ_out/φ_out(z_s)`, the two branches at `z = 1`
    /// normalized at the surface.
    Mixed { rho: C64, z_surface: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchConfig {
    pub z_match: f64,
    pub r_start: f64,
    pub r_max: f64,
    pub max_steps: usize,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig { z_match: DEFAULT_MATCH, r_start: R_START, r_max: R_MAX, max_steps: DEFAULT_MAX_STEPS }
    }
}

impl MatchConfig {
    pub fn with_r_start(self, r_start: f64) -> Self {
        MatchConfig { r_start, ..self }
    }
}

/// A boundary solution carried to the matching point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryState {
    pub state: StatePair,
    pub report: ContinuationReport,
    /// Seed radius and truncation data, for the asymptotic condition.
    pub seed_radius: Option<f64>,
    pub seed: Option<AsymptoticValue>,
}

/// Direction in which the power-law solution is most recessive, pulled
/// away from the negative real axis.
pub fn seed_angle(params: &ConfluentParams) -> f64 {
    let th = -(-params.alpha).arg();
    th.clamp(-(std::f64::consts::PI - RAY_MARGIN), std::f64::consts::PI - RAY_MARGIN)
}

/// Ray from `R e^{iθ}` to `z_m e^{iθ}`, then an arc of radius `z_m` down to `z_m`.
fn inward_path(theta: f64, radius: f64, z_m: f64) -> Result<ContinuationPath> {
    let e = C64::from_polar(1.0, theta);
    let mut w = vec![e * radius, e * z_m];
    let n = (theta.abs() / (std::f64::consts::PI / 32.0)).ceil() as usize;
    for k in 1..=n {
        w.push(C64::from_polar(z_m, theta * (1.0 - k as f64 / n as f64)));
    }
    if n == 0 {
        w.pop();
        w.push(C64::new(z_m, 0.0));
    }
    ContinuationPath::new(w, 0.1)
}

fn along_real(params: &ConfluentParams, from: f64, to: f64) -> Result<ContinuationPath> {
    if from == to {
        return ContinuationPath::new(vec![C64::new(from, 0.0); 2], 0.1);
    }
    ContinuationPath::for_equation(params, vec![C64::new(from, 0.0), C64::new(to, 0.0)], 0.1)
}

/// State of a branch at `z = 1` at the real point `z > 1`.
fn horizon_branch_at(params: &ConfluentParams, branch: Branch, z: f64, opts: &ContinuationOptions) -> Result<(StatePair, ContinuationReport)> {
    let sol = confluent_series(params, SingularPoint::One, branch, DEFAULT_TERMS)?;
    let here = C64::new(z, 0.0);
    if (z - 1.0) <= DISC_FRACTION * sol.radius() {
        return Ok((series_state(&sol, here, opts.tol)?, ContinuationReport::default()));
    }
    let seed = series_state(&sol, C64::new(1.0 + HORIZON_SEED, 0.0), opts.tol)?;
    continue_with_report(params, seed, &along_real(params, 1.0 + HORIZON_SEED, z)?, opts)
}

pub fn boundary_solution(
    params: &ConfluentParams,
    condition: &BoundaryCondition,
    cfg: &MatchConfig,
    tol: f64,
) -> Result<BoundaryState> {
    let opts = ContinuationOptions::new(tol).with_max_steps(cfg.max_steps);
    let z_m = cfg.z_match;
    if !(z_m > 1.0 + HORIZON_SEED) {
        return Err(HeunError::InvalidInput(format!("matching point {z_m} must exceed {}", 1.0 + HORIZON_SEED)));
    }
    match *condition {
        BoundaryCondition::RecessiveAtInfinity => {
            let theta = seed_angle(params);
            let exp = ThomeExpansion::new(params, ThomeKind::Recessive)?;
            let target = tol.max(THOME_FLOOR);
            let mut radius = cfg.r_start.max(2.0 * z_m);
            loop {
                let z0 = C64::from_polar(radius, theta);
                let v = exp.eval(z0);
                if v.rel_error <= target {
                    let start = StatePair::new(z0, v.value, v.derivative);
                    // the seed is rescaled so that the carried state stays O(1)
                    let start = start.scaled(ONE / start.magnitude());
                    let (state, report) = continue_with_report(params, start, &inward_path(theta, radius, z_m)?, &opts)?;
                    return Ok(BoundaryState { state, report, seed_radius: Some(radius), seed: Some(v) });
                }
                if radius >= cfg.r_max {
                    return Err(HeunError::AsymptoticNotConverged { tol: target, r_max: cfg.r_max });
                }
                radius = (radius * R_GROWTH).min(cfg.r_max);
            }
        }
        BoundaryCondition::ExponentBranch(branch) => {
            let (state, report) = horizon_branch_at(params, branch, z_m, &opts)?;
            Ok(BoundaryState { state, report, seed_radius: None, seed: None })
        }
        BoundaryCondition::Mixed { rho, z_surface } => {
            if !(z_surface > 1.0) {
                return Err(HeunError::InvalidInput(format!("surface at z = {z_surface} is not outside the horizon")));
            }
            let (s_in, r1) = horizon_branch_at(params, Branch::First, z_surface, &opts)?;
            let (s_out, r2) = horizon_branch_at(params, Branch::Second, z_surface, &opts)?;
            if s_in.h.norm() == 0.0 || s_out.h.norm() == 0.0 {
                return Err(HeunError::DegenerateBasis(0.0));
            }
            let a = s_in.scaled(ONE / s_in.h);
            let b = s_out.scaled(rho / s_out.h);
            let start = StatePair::new(a.z, a.h + b.h, a.hp + b.hp);
            let (state, r3) = continue_with_report(params, start, &along_real(params, z_surface, z_m)?, &opts)?;
            let report = ContinuationReport {
                steps: r1.steps + r2.steps + r3.steps,
                rejected: r1.rejected + r2.rejected + r3.rejected,
                err_estimate: r1.err_estimate + r2.err_estimate + r3.err_estimate,
            };
            Ok(BoundaryState { state, report, seed_radius: None, seed: None })
        }
    }
}

/// Value of the matching determinant with the data behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    pub value: C64,
    /// Rough absolute error estimate of `value`.
    pub est_error: f64,
    pub inner: StatePair,
    pub outer: StatePair,
    pub seed_radius: f64,
}

/// `W(inner, outer) / (|inner|·|outer|)` at the matching point.
pub fn scale_free_wronskian(inner: &StatePair, outer: &StatePair) -> Result<C64> {
    let n = inner.magnitude() * outer.magnitude();
    if !(n > 0.0 && n.is_finite()) {
        return Err(HeunError::DegenerateBasis(n));
    }
    Ok(wronskian(inner, outer)? / n)
}

pub fn determinant_with(prob: &RWProblem, omega: C64, tol: f64, cfg: &MatchConfig) -> Result<Determinant> {
    let (params, _) = rw_to_confluent(prob, omega)?;
    let inner = boundary_solution(&params, &prob.inner_condition(), cfg, tol)?;
    let outer = boundary_solution(&params, &BoundaryCondition::RecessiveAtInfinity, cfg, tol)?;
    let value = scale_free_wronskian(&inner.state, &outer.state)?;
    let seed_err = outer.seed.map_or(0.0, |v| v.rel_error);
    let est_error = inner.report.err_estimate + outer.report.err_estimate + seed_err + 1e-15;
    Ok(Determinant {
        value,
        est_error,
        inner: inner.state,
        outer: outer.state,
        seed_radius: outer.seed_radius.unwrap_or(f64::NAN),
    })
}

/// Matching determinant `D(ω)` with the default matching configuration.
pub fn matching_determinant(prob: &RWProblem, omega: C64, tol: f64) -> Result<C64> {
    determinant_with(prob, omega, tol, &MatchConfig::default()).map(|d| d.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::leaver_qnm;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(RWProblem::black_hole(0.0, 2, 2).is_err());
        assert!(RWProblem::black_hole(1.0, 1, 0).is_err());
        assert!(RWProblem::black_hole(1.0, 2, 3).is_err());
        assert!(RWProblem::new(1.0, 2, 2, c(1.0, 0.5), Surface::Horizon).is_err());
        assert!(RWProblem::new(1.0, 2, 2, c(0.5, 0.0), Surface::Radius(1.5)).is_err());
    }

    #[test]
    fn transform_passes_residual_check() {
        let p = RWProblem::black_hole(1.0, 2, 2).unwrap();
        for w in [c(0.37, -0.09), c(0.8, 0.3), c(-0.2, -0.6)] {
            rw_to_confluent_checked(&p, w).unwrap();
        }
        let p = RWProblem::black_hole(1.7, 3, 0).unwrap();
        rw_to_confluent_checked(&p, c(0.3, -0.2)).unwrap();
        assert!(rw_to_confluent(&p, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn horizon_exponents_differ_by_4i_m_omega() {
        let p = RWProblem::black_hole(1.3, 2, 2).unwrap();
        let w = c(0.3, -0.1);
        let (_, t) = rw_to_confluent(&p, w).unwrap();
        let [a, b] = t.horizon_exponents();
        assert!(((b - a) - 4.0 * c(0.0, 1.0) * 1.3 * w).norm() < 1e-15);
    }

    #[test]
    fn determinant_vanishes_at_leaver_root() {
        let p = RWProblem::black_hole(1.0, 2, 2).unwrap();
        let w = leaver_qnm(1.0, 2, 2, 0, 300).unwrap();
        let d = matching_determinant(&p, w, 1e-12).unwrap();
        assert!(d.norm() < 1e-8, "|D| = {}", d.norm());
        let off = matching_determinant(&p, w + c(0.01, 0.0), 1e-12).unwrap();
        assert!(off.norm() > 1e-4);
    }

    #[test]
    fn finds_fundamental_and_first_overtone() {
        let p = RWProblem::black_hole(1.0, 2, 2).unwrap();
        let region = Region::new(0.2, 0.5, -0.35, -0.03).unwrap();
        let t = std::time::Instant::now();
        let out = find_modes(&p, region, (12, 12), 1e-9).unwrap();
        eprintln!("{:?} {:?}", t.elapsed(), out.diagnostics);
        assert_eq!(out.modes.len(), 2, "{:?}", out.modes);
        assert_eq!(out.diagnostics.winding_number, Some(2));
        for (n, m) in out.modes.iter().enumerate() {
            let l = leaver_qnm(1.0, 2, 2, n, 300).unwrap();
            assert!((m.omega.re - l.re).abs() < 1e-6 && (m.omega.im - l.im).abs() < 1e-6, "{m:?} vs {l}");
        }
    }

    #[test]
    fn determinant_is_scale_free() {
        let p = RWProblem::black_hole(1.0, 2, 2).unwrap();
        let d = determinant_with(&p, c(0.35, -0.15), 1e-12, &MatchConfig::default()).unwrap();
        let scaled = scale_free_wronskian(&d.inner.scaled(c(3.0, 0.0)), &d.outer.scaled(c(1e-5, 0.0))).unwrap();
        assert!((scaled - d.value).norm() < 1e-14);
        // complex factors only rotate the phase
        let rotated = scale_free_wronskian(&d.inner.scaled(c(-3.0, 7.0)), &d.outer.scaled(c(1e-5, 2.0))).unwrap();
        assert!((rotated.norm() - d.value.norm()).abs() < 1e-14);
    }
}
