//! Polygonal continuation paths. A path fixes the branch: two paths with the
//! same endpoints that wind differently around a singular point give
//! different values.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{HeunError, Result};
use crate::numeric::{cvec_serde, is_finite, point_segment_distance, C64};
use crate::params::{min_singularity_gap, Equation};

/// Angular resolution of detour arcs and loops.
const ARC_STEP: f64 = PI / 16.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPath")]
pub struct ContinuationPath {
    #[serde(with = "cvec_serde")]
    waypoints: Vec<C64>,
    clearance: f64,
}

#[derive(Deserialize)]
struct RawPath {
    #[serde(with = "cvec_serde")]
    waypoints: Vec<C64>,
    clearance: f64,
}

impl TryFrom<RawPath> for ContinuationPath {
    type Error = HeunError;

    fn try_from(raw: RawPath) -> Result<Self> {
        ContinuationPath::new(raw.waypoints, raw.clearance)
    }
}

impl ContinuationPath {
    /// Checks the shape invariants only: at least two waypoints, distinct
    /// consecutive waypoints, positive clearance. The two-point path `[z, z]`
    /// is accepted as the identity continuation.
    pub fn new(waypoints: Vec<C64>, clearance: f64) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(HeunError::InvalidPath("a path needs at least two waypoints".into()));
        }
        if !(clearance > 0.0 && clearance.is_finite()) {
            return Err(HeunError::InvalidPath(format!("clearance must be positive, got {clearance}")));
        }
        if waypoints.iter().any(|z| !is_finite(*z)) {
            return Err(HeunError::InvalidPath("non-finite waypoint".into()));
        }
        let degenerate = waypoints.len() == 2 && waypoints[0] == waypoints[1];
        if !degenerate && waypoints.windows(2).any(|w| w[0] == w[1]) {
            return Err(HeunError::InvalidPath("consecutive waypoints coincide".into()));
        }
        Ok(ContinuationPath { waypoints, clearance })
    }

    /// [`ContinuationPath::new`] plus the clearance check against `eq`.
    pub fn for_equation<E: Equation + ?Sized>(eq: &E, waypoints: Vec<C64>, clearance: f64) -> Result<Self> {
        let p = Self::new(waypoints, clearance)?;
        p.validate_for(eq)?;
        Ok(p)
    }

    pub fn validate_for<E: Equation + ?Sized>(&self, eq: &E) -> Result<()> {
        for s in eq.finite_singularities() {
            for w in self.waypoints.windows(2) {
                let d = point_segment_distance(s, w[0], w[1]);
                if d < self.clearance {
                    return Err(HeunError::SingularityTooClose {
                        point: format!("{s}"),
                        distance: d,
                        clearance: self.clearance,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn waypoints(&self) -> &[C64] {
        &self.waypoints
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn start(&self) -> C64 {
        self.waypoints[0]
    }

    pub fn end(&self) -> C64 {
        *self.waypoints.last().unwrap()
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    pub fn is_degenerate(&self) -> bool {
        self.waypoints.len() == 2 && self.waypoints[0] == self.waypoints[1]
    }

    pub fn reversed(&self) -> ContinuationPath {
        let mut w = self.waypoints.clone();
        w.reverse();
        ContinuationPath { waypoints: w, clearance: self.clearance }
    }

    /// `self` followed by `next`; `next` must start where `self` ends.
    pub fn then(&self, next: &ContinuationPath) -> Result<ContinuationPath> {
        if self.end() != next.start() {
            return Err(HeunError::InvalidPath("paths do not join".into()));
        }
        let mut w: Vec<C64> = if self.is_degenerate() { vec![self.start()] } else { self.waypoints.clone() };
        let tail = if next.is_degenerate() { &next.waypoints[..0] } else { &next.waypoints[1..] };
        w.extend_from_slice(tail);
        if w.len() < 2 {
            w.push(w[0]);
        }
        ContinuationPath::new(w, self.clearance.min(next.clearance))
    }

    /// Inserts `extra` evenly spaced collinear waypoints into every segment.
    pub fn refined(&self, extra: usize) -> ContinuationPath {
        if self.is_degenerate() {
            return self.clone();
        }
        let mut w = Vec::with_capacity(self.waypoints.len() * (extra + 1));
        for seg in self.waypoints.windows(2) {
            for j in 0..=extra {
                w.push(seg[0] + (seg[1] - seg[0]) * (j as f64 / (extra + 1) as f64));
            }
        }
        w.push(self.end());
        ContinuationPath { waypoints: w, clearance: self.clearance }
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Point at arc length `s` from the start.
    pub fn point_at(&self, s: f64) -> C64 {
        let mut rest = s.max(0.0);
        for w in self.waypoints.windows(2) {
            let len = (w[1] - w[0]).norm();
            if rest <= len && len > 0.0 {
                return w[0] + (w[1] - w[0]) * (rest / len);
            }
            rest -= len;
        }
        self.end()
    }

    /// Splits at arc length `s` into a head ending at the split point and a
    /// tail starting there.
    pub fn split_at(&self, s: f64) -> Result<(ContinuationPath, ContinuationPath)> {
        let total = self.length();
        if !(s > 0.0 && s < total) {
            return Err(HeunError::InvalidPath(format!("split position {s} outside (0, {total})")));
        }
        let mut head = vec![self.waypoints[0]];
        let mut acc = 0.0;
        let mut split_seg = 0;
        let mut point = self.end();
        for (i, w) in self.waypoints.windows(2).enumerate() {
            let len = (w[1] - w[0]).norm();
            if acc + len >= s {
                point = w[0] + (w[1] - w[0]) * ((s - acc) / len);
                split_seg = i;
                break;
            }
            acc += len;
            head.push(w[1]);
        }
        let mut tail = vec![point];
        tail.extend_from_slice(&self.waypoints[split_seg + 1..]);
        if tail.len() >= 2 && tail[0] == tail[1] {
            tail.remove(0);
        }
        if *head.last().unwrap() != point {
            head.push(point);
        }
        Ok((
            ContinuationPath::new(head, self.clearance)?,
            ContinuationPath::new(tail, self.clearance)?,
        ))
    }

    /// Default factory: straight segment `from → to`, with a circular detour
    /// around every singular point the segment would pass within the detour
    /// radius `max(clearance, 0.05·min-gap)` of. Each detour takes the arc on
    /// the upper-half-plane side (larger imaginary part at its midpoint; for
    /// an exact tie, the side with smaller real part).
    pub fn straight<E: Equation + ?Sized>(eq: &E, from: C64, to: C64, clearance: f64) -> Result<ContinuationPath> {
        if from == to {
            return ContinuationPath::for_equation(eq, vec![from, to], clearance);
        }
        let gap = min_singularity_gap(eq);
        let radius = if gap.is_finite() { clearance.max(0.05 * gap) } else { clearance };
        // vertices on a circle of this radius keep every chord at distance >= radius
        let vertex_radius = radius / (ARC_STEP / 2.0).cos() * (1.0 + 1e-9);
        let dir = (to - from) / (to - from).norm();
        let len = (to - from).norm();

        let mut hits: Vec<(f64, C64)> = eq
            .finite_singularities()
            .into_iter()
            .filter_map(|s| {
                let t = ((s - from) * dir.conj()).re;
                let foot = from + dir * t;
                let d = (s - foot).norm();
                (d < vertex_radius && t > -vertex_radius && t < len + vertex_radius).then_some((t, s))
            })
            .collect();
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut w = vec![from];
        let mut last_t = 0.0;
        for (t, s) in hits {
            let foot = from + dir * t;
            let d = (s - foot).norm();
            let half = (vertex_radius * vertex_radius - d * d).sqrt();
            let (t_in, t_out) = (t - half, t + half);
            if t_in <= last_t || t_out >= len {
                return Err(HeunError::SingularityTooClose {
                    point: format!("{s}"),
                    distance: point_segment_distance(s, from, to),
                    clearance: radius,
                });
            }
            let p_in = from + dir * t_in;
            let p_out = from + dir * t_out;
            w.push(p_in);
            w.extend(detour_arc(s, p_in, p_out, vertex_radius));
            w.push(p_out);
            last_t = t_out;
        }
        w.push(to);
        ContinuationPath::for_equation(eq, w, clearance)
    }

    /// Counter-clockwise closed loop around `center` passing through `base`.
    pub fn circle(center: C64, base: C64, clearance: f64) -> Result<ContinuationPath> {
        let r = base - center;
        if r.norm() == 0.0 {
            return Err(HeunError::InvalidPath("loop base coincides with its centre".into()));
        }
        let n = 32;
        let mut w: Vec<C64> = (0..n)
            .map(|k| center + r * C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
            .collect();
        w[0] = base;
        w.push(base);
        ContinuationPath::new(w, clearance)
    }

    /// Counter-clockwise loop based at `base` that encircles only `center`:
    /// a plain circle when `base` is close enough to `center`, otherwise a
    /// keyhole (straight leg in, circle, same leg out).
    pub fn loop_around<E: Equation + ?Sized>(eq: &E, base: C64, center: C64, clearance: f64) -> Result<ContinuationPath> {
        let others = eq
            .finite_singularities()
            .into_iter()
            .filter(|s| (*s - center).norm() > 0.0)
            .map(|s| (s - center).norm())
            .fold(f64::INFINITY, f64::min);
        let reach = (base - center).norm();
        let loop_radius = 0.5 * others;
        if reach <= loop_radius {
            let p = Self::circle(center, base, clearance)?;
            p.validate_for(eq)?;
            return Ok(p);
        }
        let entry = center + (base - center) * (loop_radius / reach);
        let leg = Self::straight(eq, base, entry, clearance)?;
        let ring = Self::circle(center, entry, clearance)?;
        let p = leg.then(&ring)?.then(&leg.reversed())?;
        p.validate_for(eq)?;
        Ok(p)
    }
}

fn detour_arc(s: C64, p_in: C64, p_out: C64, radius: f64) -> Vec<C64> {
    let th_in = (p_in - s).arg();
    let th_out = (p_out - s).arg();
    let mut ccw = th_out - th_in;
    while ccw <= 0.0 {
        ccw += 2.0 * PI;
    }
    let cw = ccw - 2.0 * PI;
    let mid = |sweep: f64| s + C64::from_polar(radius, th_in + sweep / 2.0);
    let (m_ccw, m_cw) = (mid(ccw), mid(cw));
    let sweep = if (m_ccw.im - m_cw.im).abs() > 1e-12 * radius {
        if m_ccw.im > m_cw.im { ccw } else { cw }
    } else if m_ccw.re < m_cw.re {
        ccw
    } else {
        cw
    };
    let n = (sweep.abs() / ARC_STEP).ceil().max(1.0) as usize;
    (1..n).map(|k| s + C64::from_polar(radius, th_in + sweep * k as f64 / n as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::HeunParams;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ContinuationPath::new(vec![c(0.0, 0.0)], 0.1).is_err());
        assert!(ContinuationPath::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)], 0.1).is_err());
        assert!(ContinuationPath::new(vec![c(0.0, 0.0), c(1.0, 0.0)], 0.0).is_err());
        assert!(ContinuationPath::new(vec![c(0.5, 0.5), c(0.5, 0.5)], 0.1).is_ok());
    }

    #[test]
    fn clearance_is_checked_against_singularities() {
        let p = HeunParams::real(3.0, 0.1, 0.2, 0.3, 0.4, 0.5).unwrap();
        let r = ContinuationPath::for_equation(&p, vec![c(0.5, -0.5), c(0.5, 0.5), c(1.03, 0.0)], 0.05);
        assert!(matches!(r, Err(HeunError::SingularityTooClose { .. })));
    }

    #[test]
    fn straight_path_detours_above_singularity() {
        let p = HeunParams::real(3.0, 0.1, 0.2, 0.3, 0.4, 0.5).unwrap();
        let path = ContinuationPath::straight(&p, c(0.5, 0.0), c(2.0, 0.0), 0.05).unwrap();
        assert!(path.waypoints().len() > 3);
        assert!(path.waypoints().iter().all(|z| z.im >= -1e-12));
        assert!(path.waypoints().iter().any(|z| z.im > 0.05));
        path.validate_for(&p).unwrap();
    }

    #[test]
    fn split_and_join() {
        let path = ContinuationPath::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)], 0.1).unwrap();
        let (h, t) = path.split_at(1.5).unwrap();
        assert_eq!(h.end(), c(1.0, 0.5));
        assert_eq!(t.start(), c(1.0, 0.5));
        let joined = h.then(&t).unwrap();
        assert!((joined.length() - path.length()).abs() < 1e-15);
    }

    #[test]
    fn keyhole_loop_is_closed_and_clear() {
        let p = HeunParams::real(3.0, 0.1, 0.2, 0.3, 0.4, 0.5).unwrap();
        let l = ContinuationPath::loop_around(&p, c(0.25, 0.0), c(1.0, 0.0), 0.05).unwrap();
        assert!(l.is_closed());
        l.validate_for(&p).unwrap();
    }

    #[test]
    fn json_shape() {
        let path = ContinuationPath::new(vec![c(0.0, 0.0), c(1.0, 2.0)], 0.1).unwrap();
        let v = serde_json::to_value(&path).unwrap();
        assert_eq!(v["waypoints"], serde_json::json!([[0.0, 0.0], [1.0, 2.0]]));
        assert_eq!(v["clearance"], serde_json::json!(0.1));
    }
}
