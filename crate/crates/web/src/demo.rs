use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use heun_core::continuation::{
    continue_with_report, monodromy_with_report, series_state, ContinuationOptions, ContinuationPath, StatePair,
};
use heun_core::frobenius::{local_series, Branch, SingularPoint, DEFAULT_TERMS, DISC_FRACTION};
use heun_core::numeric::cserde;
use heun_core::oracles::leaver_qnm;
use heun_core::spectral::{find_modes_with, GridScan, Mode, RWProblem, Region, SearchOptions, Surface};
use heun_core::{EquationParams, HeunError, Mat2, C64};

const MAX_SAMPLES: usize = 400;
const MAX_GRID: usize = 64;
const LEAVER_DEPTH: usize = 300;
const LOOP_BASE_DIR: C64 = C64::new(0.6, 0.8);

#[derive(Debug, Clone, PartialEq)]
pub struct DemoError {
    pub module: &'static str,
    pub message: String,
}

impl From<HeunError> for DemoError {
    fn from(e: HeunError) -> Self {
        DemoError { module: e.module(), message: e.to_string() }
    }
}

fn input(message: impl Into<String>) -> DemoError {
    DemoError { module: "input", message: message.into() }
}

pub fn parse<T: DeserializeOwned>(request: &str) -> Result<T, DemoError> {
    serde_json::from_str(request).map_err(|e| input(e.to_string()))
}

fn check_tol(tol: f64) -> Result<f64, DemoError> {
    if (1e-14..=1e-3).contains(&tol) {
        Ok(tol)
    } else {
        Err(input(format!("tol must lie in [1e-14, 1e-3], got {tol}")))
    }
}

fn default_tol() -> f64 {
    1e-10
}

fn default_samples() -> usize {
    80
}

fn default_clearance() -> f64 {
    0.05
}

#[derive(Debug, Clone, Deserialize)]
pub struct ProfileRequest {
    pub params: EquationParams,
    #[serde(default = "zero")]
    pub point: SingularPoint,
    #[serde(default = "first")]
    pub branch: Branch,
    #[serde(with = "cserde")]
    pub to: C64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_clearance")]
    pub clearance: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn zero() -> SingularPoint {
    SingularPoint::Zero
}

fn first() -> Branch {
    Branch::First
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    #[serde(with = "cserde")]
    pub z: C64,
    #[serde(with = "cserde")]
    pub value: C64,
    #[serde(with = "cserde")]
    pub derivative: C64,
    pub series: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    #[serde(with = "cserde")]
    pub centre: C64,
    #[serde(with = "cserde")]
    pub exponent: C64,
    pub radius: f64,
    pub samples: Vec<Sample>,
}

/// Samples `z0 + t (to - z0)` for `t = 1/n, ..., 1`: by series inside the disc,
/// then by continuing from one sample to the next.
pub fn profile(r: &ProfileRequest) -> Result<Profile, DemoError> {
    let tol = check_tol(r.tol)?;
    if !(2..=MAX_SAMPLES).contains(&r.samples) {
        return Err(input(format!("samples must lie in [2, {MAX_SAMPLES}]")));
    }
    let sol = local_series(&r.params, r.point, r.branch, DEFAULT_TERMS)?;
    let z0 = sol.expansion_point();
    if r.to == z0 {
        return Err(input("the segment has zero length"));
    }
    let opts = ContinuationOptions::new(tol);
    let cap = DISC_FRACTION * sol.radius();
    let mut samples = Vec::with_capacity(r.samples);
    let mut state: Option<StatePair> = None;
    for k in 1..=r.samples {
        let z = z0 + (r.to - z0) * (k as f64 / r.samples as f64);
        let (s, series) = match state {
            Some(prev) if (z - z0).norm() > cap => {
                let path = ContinuationPath::straight(&r.params, prev.z, z, r.clearance)?;
                (continue_with_report(&r.params, prev, &path, &opts)?.0, false)
            }
            _ if (z - z0).norm() <= cap => (series_state(&sol, z, tol)?, true),
            _ => {
                let seed = sol.seed_point(0.5, r.to - z0);
                let start = series_state(&sol, seed, tol)?;
                let path = ContinuationPath::straight(&r.params, seed, z, r.clearance)?;
                (continue_with_report(&r.params, start, &path, &opts)?.0, false)
            }
        };
        samples.push(Sample { z, value: s.h, derivative: s.hp, series });
        state = Some(s);
    }
    Ok(Profile { centre: z0, exponent: sol.exponent(), radius: sol.radius(), samples })
}

#[derive(Debug, Clone, Deserialize)]
pub struct MonodromyRequest {
    pub params: EquationParams,
    pub around: SingularPoint,
    pub basis: Option<SingularPoint>,
    #[serde(default = "default_clearance")]
    pub clearance: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonodromyResult {
    pub matrix: Mat2,
    #[serde(with = "heun_core::numeric::cvec_serde")]
    pub eigenvalues: Vec<C64>,
    #[serde(with = "heun_core::numeric::cvec_serde")]
    pub exponents: Vec<C64>,
    pub abel_mismatch: f64,
    #[serde(with = "heun_core::numeric::cvec_serde")]
    pub loop_path: Vec<C64>,
}

/// `M` with `continue(Y) = Y·M` for the counter-clockwise loop around `around`.
pub fn monodromy(r: &MonodromyRequest) -> Result<MonodromyResult, DemoError> {
    let tol = check_tol(r.tol)?;
    let at = r.basis.unwrap_or(r.around);
    let basis = [
        local_series(&r.params, at, Branch::First, DEFAULT_TERMS)?,
        local_series(&r.params, at, Branch::Second, DEFAULT_TERMS)?,
    ];
    let centre = local_series(&r.params, r.around, Branch::First, 2)?.expansion_point();
    let z0 = basis[0].expansion_point();
    let dir = if at == r.around { LOOP_BASE_DIR } else { centre - z0 };
    let lp = ContinuationPath::loop_around(&r.params, basis[0].seed_point(0.5, dir), centre, r.clearance)?;
    let m = monodromy_with_report(&r.params, &basis, &lp, &ContinuationOptions::new(tol))?;
    Ok(MonodromyResult {
        matrix: m.matrix,
        eigenvalues: m.matrix.eigenvalues().to_vec(),
        exponents: vec![basis[0].exponent(), basis[1].exponent()],
        abel_mismatch: m.abel_mismatch,
        loop_path: lp.waypoints().to_vec(),
    })
}

fn default_grid() -> [usize; 2] {
    [24, 24]
}

fn default_root_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Deserialize)]
pub struct QnmRequest {
    #[serde(default = "unit")]
    pub mass: f64,
    pub ell: u32,
    pub s: i32,
    #[serde(default, with = "cserde")]
    pub rho: C64,
    pub r_surface: Option<f64>,
    pub region: [f64; 4],
    #[serde(default = "default_grid")]
    pub grid: [usize; 2],
    #[serde(default = "default_root_tol")]
    pub tol: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QnmScan {
    pub modes: Vec<Mode>,
    pub grid: GridScan,
    pub winding_number: Option<i64>,
    /// Continued-fraction frequencies for the pure black hole, when applicable.
    #[serde(with = "heun_core::numeric::cvec_serde")]
    pub reference: Vec<C64>,
}

pub fn qnm_scan(r: &QnmRequest) -> Result<QnmScan, DemoError> {
    let tol = check_tol(r.tol)?;
    let [nx, ny] = r.grid;
    if nx > MAX_GRID || ny > MAX_GRID {
        return Err(input(format!("grid is capped at {MAX_GRID}x{MAX_GRID} in the browser")));
    }
    let surface = r.r_surface.map_or(Surface::Horizon, Surface::Radius);
    let prob = RWProblem::new(r.mass, r.ell, r.s, r.rho, surface)?;
    let [a, b, c, d] = r.region;
    let region = Region::new(a, b, c, d)?;
    let search = find_modes_with(&prob, region, (nx, ny), &SearchOptions::new(tol))?;
    let reference = if r.rho == C64::new(0.0, 0.0) && surface == Surface::Horizon {
        (0..4)
            .filter_map(|n| leaver_qnm(r.mass, r.ell, r.s, n, LEAVER_DEPTH).ok())
            .filter(|w| region.contains(*w))
            .collect()
    } else {
        Vec::new()
    };
    Ok(QnmScan {
        modes: search.modes,
        grid: search.grid,
        winding_number: search.diagnostics.winding_number,
        reference,
    })
}
