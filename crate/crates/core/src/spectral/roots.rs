//! Grid scan, Newton/secant polishing and argument-principle audit.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HeunError, Result};
use crate::numeric::{cserde, C64};

use super::{determinant_with, MatchConfig, RWProblem};

const NEWTON_MAX: usize = 40;
const DEDUPE: f64 = 1e-6;
const DIFF_STEP: f64 = 1e-7;
const MIN_SNR: f64 = 10.0;
/// Largest phase change accepted between neighbouring contour samples.
const MAX_PHASE_STEP: f64 = PI / 4.0;
const MAX_BISECTIONS: usize = 20;

/// Closed rectangle in the complex ω plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Region { re_min, re_max, im_min, im_max };
        if ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) || re_min >= re_max || im_min >= im_max {
            return Err(HeunError::InvalidInput(format!("empty or non-finite region {r:?}")));
        }
        if r.contains(C64::new(0.0, 0.0)) {
            return Err(HeunError::InvalidInput("region must not contain omega = 0".into()));
        }
        Ok(r)
    }

    pub fn contains(&self, w: C64) -> bool {
        w.re >= self.re_min && w.re <= self.re_max && w.im >= self.im_min && w.im <= self.im_max
    }

    /// Mirror image under `ω → -ω̄`.
    pub fn mirrored(&self) -> Region {
        Region { re_min: -self.re_max, re_max: -self.re_min, ..*self }
    }

    pub fn scaled(&self, k: f64) -> Result<Region> {
        Region::new(self.re_min * k, self.re_max * k, self.im_min * k, self.im_max * k)
    }

    /// Corners, counter-clockwise from the lower-left one.
    pub fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ]
    }
}

/// `re_min,re_max,im_min,im_max`.
impl FromStr for Region {
    type Err = HeunError;

    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| HeunError::InvalidInput(format!("region `{s}`: {e}")))?;
        match v[..] {
            [a, b, c, d] => Region::new(a, b, c, d),
            _ => Err(HeunError::InvalidInput(format!("region `{s}` needs four numbers"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    #[serde(with = "cserde")]
    pub omega: C64,
    /// Position in the returned list (sorted by damping).
    pub overtone_hint: usize,
    /// `|D(ω)|` at the root.
    pub residual: f64,
    pub newton_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Acceptance bound on `|D|`.
    pub tol: f64,
    /// Continuation tolerance; derived from `tol` when `None`.
    pub cont_tol: Option<f64>,
    pub matching: MatchConfig,
    /// Run the argument-principle audit on the region boundary.
    pub audit: bool,
}

impl SearchOptions {
    pub fn new(tol: f64) -> Self {
        SearchOptions { tol, cont_tol: None, matching: MatchConfig::default(), audit: true }
    }

    pub fn continuation_tol(&self) -> f64 {
        self.cont_tol.unwrap_or_else(|| (self.tol * 1e-3).clamp(1e-13, 1e-8))
    }
}

/// `|D|` sampled on the scan grid, rows of constant `Im ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScan {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// `abs_d[j][i]` at `re[i] + i·im[j]`; `NaN` where evaluation failed.
    pub abs_d: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchDiagnostics {
    pub grid: [usize; 2],
    pub seeds: usize,
    pub converged: usize,
    pub nonconverged: usize,
    pub outside_region: usize,
    pub duplicates: usize,
    pub failed_grid_points: usize,
    pub winding_number: Option<i64>,
    pub continuation_tol: f64,
    pub z_match: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSearch {
    pub modes: Vec<Mode>,
    pub diagnostics: SearchDiagnostics,
    pub grid: GridScan,
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

pub fn find_modes(prob: &RWProblem, region: Region, grid: (usize, usize), tol: f64) -> Result<ModeSearch> {
    find_modes_with(prob, region, grid, &SearchOptions::new(tol))
}

pub fn find_modes_with(prob: &RWProblem, region: Region, grid: (usize, usize), opts: &SearchOptions) -> Result<ModeSearch> {
    let (nx, ny) = grid;
    if nx < 8 || ny < 8 {
        return Err(HeunError::InvalidInput(format!("grid must be at least 8x8, got {nx}x{ny}")));
    }
    let region = Region::new(region.re_min, region.re_max, region.im_min, region.im_max)?;
    let cont_tol = opts.continuation_tol();
    let eval = |w: C64| determinant_with(prob, w, cont_tol, &opts.matching);

    let re: Vec<f64> = (0..nx).map(|i| region.re_min + (region.re_max - region.re_min) * i as f64 / (nx - 1) as f64).collect();
    let im: Vec<f64> = (0..ny).map(|j| region.im_min + (region.im_max - region.im_min) * j as f64 / (ny - 1) as f64).collect();
    let nodes: Vec<(usize, usize)> = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).collect();
    let values = par_map(&nodes, |&(i, j)| eval(C64::new(re[i], im[j])).map_or(f64::NAN, |d| d.value.norm()));
    let abs_d: Vec<Vec<f64>> = values.chunks(nx).map(|r| r.to_vec()).collect();
    let failed_grid_points = values.iter().filter(|v| v.is_nan()).count();

    let seeds: Vec<C64> = nodes
        .iter()
        .filter(|&&(i, j)| is_local_min(&abs_d, i, j))
        .map(|&(i, j)| C64::new(re[i], im[j]))
        .collect();

    let refined = par_map(&seeds, |&w| polish(&eval, w, opts.tol));
    let mut converged = 0;
    let mut outside_region = 0;
    let mut found: Vec<Mode> = Vec::new();
    for r in refined.iter().flatten() {
        converged += 1;
        if !region.contains(r.omega) {
            outside_region += 1;
            continue;
        }
        found.push(*r);
    }
    let nonconverged = seeds.len() - converged;

    found.sort_by(|a, b| a.omega.im.abs().total_cmp(&b.omega.im.abs()).then(a.omega.re.total_cmp(&b.omega.re)));
    let mut modes: Vec<Mode> = Vec::new();
    for m in found {
        match modes.iter_mut().find(|k| (k.omega - m.omega).norm() < DEDUPE) {
            Some(k) if m.residual < k.residual => *k = m,
            Some(_) => {}
            None => modes.push(m),
        }
    }
    let duplicates = converged - outside_region - modes.len();
    modes.sort_by(|a, b| a.omega.im.abs().total_cmp(&b.omega.im.abs()).then(a.omega.re.total_cmp(&b.omega.re)));
    for (n, m) in modes.iter_mut().enumerate() {
        m.overtone_hint = n;
    }

    let winding = if opts.audit {
        Some(winding_number(|w| eval(w).map(|d| d.value), &region, (nx.max(16), ny.max(16)))?)
    } else {
        None
    };

    Ok(ModeSearch {
        modes,
        diagnostics: SearchDiagnostics {
            grid: [nx, ny],
            seeds: seeds.len(),
            converged,
            nonconverged,
            outside_region,
            duplicates,
            failed_grid_points,
            winding_number: winding,
            continuation_tol: cont_tol,
            z_match: opts.matching.z_match,
        },
        grid: GridScan { re, im, abs_d },
    })
}

fn is_local_min(v: &[Vec<f64>], i: usize, j: usize) -> bool {
    let c = v[j][i];
    if c.is_nan() {
        return false;
    }
    let (ny, nx) = (v.len() as i64, v[0].len() as i64);
    for dj in -1i64..=1 {
        for di in -1i64..=1 {
            let (x, y) = (i as i64 + di, j as i64 + dj);
            if (di, dj) == (0, 0) || x < 0 || y < 0 || x >= nx || y >= ny {
                continue;
            }
            let n = v[y as usize][x as usize];
            if n < c {
                return false;
            }
        }
    }
    true
}

/// Newton with a central-difference derivative; falls back to a secant
/// step when the difference quotient is dominated by evaluation noise.
fn polish<F>(eval: &F, start: C64, tol: f64) -> Option<Mode>
where
    F: Fn(C64) -> Result<super::Determinant>,
{
    let mut w = start;
    let mut d = eval(w).ok()?;
    let mut prev: Option<(C64, C64)> = None;
    for it in 1..=NEWTON_MAX {
        let h = DIFF_STEP * w.norm();
        let dp = eval(w + h).ok()?.value;
        let dm = eval(w - h).ok()?.value;
        let slope = (dp - dm) / (2.0 * h);
        let snr = slope.norm() * h / d.est_error;
        let step = match prev {
            Some((wp, vp)) if snr < MIN_SNR && d.value != vp => d.value * (w - wp) / (d.value - vp),
            _ if slope.norm() > 0.0 => d.value / slope,
            _ => return None,
        };
        prev = Some((w, d.value));
        let next = w - step;
        let dn = eval(next).ok()?;
        w = next;
        d = dn;
        if step.norm() <= 1e-12 * w.norm() {
            return (d.value.norm() <= tol).then_some(Mode {
                omega: w,
                overtone_hint: 0,
                residual: d.value.norm(),
                newton_steps: it,
            });
        }
    }
    (d.value.norm() <= tol).then_some(Mode { omega: w, overtone_hint: 0, residual: d.value.norm(), newton_steps: NEWTON_MAX })
}

/// Number of zeros minus poles of `f` inside the rectangle, from the total
/// phase change along its boundary. Edges start with `samples` points and
/// are bisected wherever the phase jumps by more than π/4.
pub fn winding_number<F>(f: F, region: &Region, samples: (usize, usize)) -> Result<i64>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let c = region.corners();
    let mut total = 0.0;
    for k in 0..4 {
        let (a, b) = (c[k], c[(k + 1) % 4]);
        let n = if k % 2 == 0 { samples.0 } else { samples.1 }.max(2);
        let ts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let vals = par_map(&ts, |&t| f(a + (b - a) * t));
        let vals: Vec<C64> = vals.into_iter().collect::<Result<_>>()?;
        for i in 0..n {
            total += phase_change(&f, a, b, ts[i], ts[i + 1], vals[i], vals[i + 1], 0)?;
        }
    }
    let w = total / (2.0 * PI);
    if (w - w.round()).abs() > 0.1 {
        return Err(HeunError::InvalidInput(format!("contour phase sum {w} is not close to an integer")));
    }
    Ok(w.round() as i64)
}

#[allow(clippy::too_many_arguments)]
fn phase_change<F>(f: &F, a: C64, b: C64, t0: f64, t1: f64, v0: C64, v1: C64, depth: usize) -> Result<f64>
where
    F: Fn(C64) -> Result<C64>,
{
    if v0.norm() == 0.0 || v1.norm() == 0.0 {
        return Err(HeunError::InvalidInput("function vanishes on the contour".into()));
    }
    let d = (v1 / v0).arg();
    if d.abs() <= MAX_PHASE_STEP || depth >= MAX_BISECTIONS {
        return Ok(d);
    }
    let tm = 0.5 * (t0 + t1);
    let vm = f(a + (b - a) * tm)?;
    Ok(phase_change(f, a, b, t0, tm, v0, vm, depth + 1)? + phase_change(f, a, b, tm, t1, vm, v1, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winding_of_polynomial() {
        let r = Region::new(-1.0, 1.0, -1.0, 1.0).unwrap_err();
        assert!(matches!(r, HeunError::InvalidInput(_)));
        let r = Region::new(0.1, 2.0, -1.0, 1.0).unwrap();
        let f = |w: C64| Ok((w - C64::new(0.5, 0.2)) * (w - C64::new(1.5, -0.7)) * (w - C64::new(3.0, 0.0)));
        assert_eq!(winding_number(f, &r, (8, 8)).unwrap(), 2);
        let g = |w: C64| Ok((w - C64::new(0.5, 0.2)).powi(3) / (w - C64::new(1.0, 0.0)));
        assert_eq!(winding_number(g, &r, (8, 8)).unwrap(), 2);
    }

    #[test]
    fn region_parsing() {
        let r: Region = "0.2,0.5,-0.35,-0.03".parse().unwrap();
        assert_eq!(r.corners()[0], C64::new(0.2, -0.35));
        assert!("1,2,3".parse::<Region>().is_err());
        assert!("0.2,0.1,-1,0".parse::<Region>().is_err());
        assert_eq!(r.mirrored().re_min, -0.5);
    }
}
