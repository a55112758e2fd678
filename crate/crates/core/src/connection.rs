//! Numerical two-point connection matrices between Frobenius bases.

use serde::{Deserialize, Serialize};

use crate::continuation::{
    continue_with_report, integral_of_p, series_state, ContinuationOptions, ContinuationPath, ContinuationReport,
    StatePair,
};
use crate::error::{HeunError, Result};
use crate::frobenius::{local_series, Branch, FrobeniusSolution, SingularPoint, DEFAULT_TERMS, DISC_FRACTION};
use crate::numeric::{cserde, Mat2, C64};
use crate::params::EquationParams;

/// Largest admissible condition number of the matching system.
pub const MAX_CONDITION: f64 = 1e8;
/// Matching points closer than this fraction of a radius to either singular point are avoided.
pub const MIN_MATCH_FRACTION: f64 = 0.3;
const SERIES_TOL: f64 = 1e-15;

/// `h1·h2' - h2·h1'` of two states at the same point.
pub fn wronskian(s1: &StatePair, s2: &StatePair) -> Result<C64> {
    if s1.z != s2.z {
        return Err(HeunError::MismatchedPoints);
    }
    Ok(s1.h * s2.hp - s2.h * s1.hp)
}

/// `C` with `basis_from = basis_to · C` at the matching point; the columns of
/// `C` hold the coordinates of the first and second `from` solutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionMatrix {
    pub from_point: SingularPoint,
    pub to_point: SingularPoint,
    pub matrix: Mat2,
    pub path: ContinuationPath,
    #[serde(with = "cserde")]
    pub matching_point: C64,
    pub est_error: f64,
    /// `det C` predicted by transporting both Wronskians with Abel's identity.
    #[serde(with = "cserde")]
    pub abel_det: C64,
    pub condition: f64,
}

/// Both Frobenius bases and the continued states used to build a connection matrix.
#[derive(Debug, Clone)]
pub struct MatchedBases {
    pub from: [FrobeniusSolution; 2],
    pub to: [FrobeniusSolution; 2],
    /// `from` basis seeded at the path start and continued to the matching point.
    pub from_states: [StatePair; 2],
    pub to_states: [StatePair; 2],
    pub report: ContinuationReport,
}

pub fn connection_matrix(
    eq: &EquationParams,
    from: SingularPoint,
    to: SingularPoint,
    path: &ContinuationPath,
    tol: f64,
) -> Result<ConnectionMatrix> {
    connection_with_bases(eq, from, to, path, &ContinuationOptions::new(tol)).map(|(c, _)| c)
}

pub fn connection_with_bases(
    eq: &EquationParams,
    from: SingularPoint,
    to: SingularPoint,
    path: &ContinuationPath,
    opts: &ContinuationOptions,
) -> Result<(ConnectionMatrix, MatchedBases)> {
    let basis = |p| -> Result<[FrobeniusSolution; 2]> {
        Ok([
            local_series(eq, p, Branch::First, DEFAULT_TERMS)?,
            local_series(eq, p, Branch::Second, DEFAULT_TERMS)?,
        ])
    };
    let from_basis = basis(from)?;
    let to_basis = basis(to)?;
    path.validate_for(eq)?;

    let (head, tail, z_m) = split_for_matching(path, &from_basis[0], &to_basis[0])?;

    let mut report = ContinuationReport::default();
    let mut carry = |sol: &FrobeniusSolution, seed: C64, leg: &ContinuationPath| -> Result<StatePair> {
        let s = series_state(sol, seed, SERIES_TOL)?;
        let (end, r) = continue_with_report(eq, s, leg, opts)?;
        report.steps += r.steps;
        report.rejected += r.rejected;
        report.err_estimate += r.err_estimate;
        Ok(end)
    };
    let back = tail.reversed();
    let from_states = [
        carry(&from_basis[0], path.start(), &head)?,
        carry(&from_basis[1], path.start(), &head)?,
    ];
    let to_states = [carry(&to_basis[0], path.end(), &back)?, carry(&to_basis[1], path.end(), &back)?];

    let y_from = Mat2::from_columns([from_states[0].h, from_states[0].hp], [from_states[1].h, from_states[1].hp]);
    let y_to = Mat2::from_columns([to_states[0].h, to_states[0].hp], [to_states[1].h, to_states[1].hp]);
    let condition = y_to.condition();
    if !(condition <= MAX_CONDITION) {
        return Err(HeunError::IllConditionedMatch(condition));
    }
    let matrix = y_to.inverse().ok_or(HeunError::IllConditionedMatch(condition))?.mul(&y_from);

    let w_from = wronskian(
        &series_state(&from_basis[0], path.start(), SERIES_TOL)?,
        &series_state(&from_basis[1], path.start(), SERIES_TOL)?,
    )?;
    let w_to = wronskian(
        &series_state(&to_basis[0], path.end(), SERIES_TOL)?,
        &series_state(&to_basis[1], path.end(), SERIES_TOL)?,
    )?;
    let abel_det = w_from / w_to * (-integral_of_p(eq, path)).exp();

    let est_error = condition * (report.err_estimate + 4.0 * SERIES_TOL) * matrix.norm();
    let c = ConnectionMatrix {
        from_point: from,
        to_point: to,
        matrix,
        path: path.clone(),
        matching_point: z_m,
        est_error,
        abel_det,
        condition,
    };
    Ok((
        c,
        MatchedBases {
            from: from_basis,
            to: to_basis,
            from_states,
            to_states,
            report,
        },
    ))
}

/// Matching point: midpoint (by arc length) of the stretch of path lying in
/// both convergence discs, provided it keeps `0.3·radius` from both singular
/// points; otherwise the sampled path point that maximises the smaller of the
/// two relative distances.
fn split_for_matching(
    path: &ContinuationPath,
    from: &FrobeniusSolution,
    to: &FrobeniusSolution,
) -> Result<(ContinuationPath, ContinuationPath, C64)> {
    for (sol, z) in [(from, path.start()), (to, path.end())] {
        let distance = (z - sol.expansion_point()).norm();
        let cap = DISC_FRACTION * sol.radius();
        if distance > cap {
            return Err(HeunError::OutsideDisc { distance, cap });
        }
    }
    if path.is_degenerate() {
        return Ok((path.clone(), path.clone(), path.start()));
    }
    let rel = |z: C64, sol: &FrobeniusSolution| (z - sol.expansion_point()).norm() / sol.radius();
    let total = path.length();
    let n = 2000;
    let samples: Vec<(f64, C64)> = (0..=n)
        .map(|i| {
            let s = total * i as f64 / n as f64;
            (s, path.point_at(s))
        })
        .collect();
    let inside: Vec<f64> = samples
        .iter()
        .filter(|(_, z)| rel(*z, from) < 1.0 && rel(*z, to) < 1.0)
        .map(|(s, _)| *s)
        .collect();
    let admissible = |z: C64| rel(z, from) >= MIN_MATCH_FRACTION && rel(z, to) >= MIN_MATCH_FRACTION;
    let mut s_m = None;
    if let (Some(lo), Some(hi)) = (inside.first(), inside.last()) {
        let mid = 0.5 * (lo + hi);
        if admissible(path.point_at(mid)) {
            s_m = Some(mid);
        }
    }
    let s_m = s_m.unwrap_or_else(|| {
        samples
            .iter()
            .max_by(|a, b| {
                let ka = rel(a.1, from).min(rel(a.1, to));
                let kb = rel(b.1, from).min(rel(b.1, to));
                ka.total_cmp(&kb)
            })
            .map(|(s, _)| *s)
            .unwrap()
    });
    let z_m = path.point_at(s_m);
    let degenerate_at = |z: C64| ContinuationPath::new(vec![z, z], path.clearance());
    if s_m <= 0.0 {
        Ok((degenerate_at(z_m)?, path.clone(), z_m))
    } else if s_m >= total {
        Ok((path.clone(), degenerate_at(z_m)?, z_m))
    } else {
        let (h, t) = path.split_at(s_m)?;
        Ok((h, t, z_m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ZERO;
    use crate::params::HeunParams;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn wronskian_of_identical_states_vanishes() {
        let s = StatePair::new(c(0.3, 0.1), c(1.0, 2.0), c(0.5, -1.0));
        assert_eq!(wronskian(&s, &s).unwrap(), ZERO);
        let t = StatePair::new(c(0.3, 0.2), c(1.0, 2.0), c(0.5, -1.0));
        assert_eq!(wronskian(&s, &t), Err(HeunError::MismatchedPoints));
    }

    #[test]
    fn same_point_degenerate_path_gives_identity() {
        let p = EquationParams::General(HeunParams::real(3.0, 0.2, 0.3, 0.6, 0.45, 0.3).unwrap());
        let z = c(0.3, 0.1);
        let path = ContinuationPath::new(vec![z, z], 0.05).unwrap();
        let cm = connection_matrix(&p, SingularPoint::Zero, SingularPoint::Zero, &path, 1e-12).unwrap();
        assert!(cm.matrix.sub(&Mat2::IDENTITY).norm() < 1e-14);
    }

    #[test]
    fn path_must_start_in_disc() {
        let p = EquationParams::General(HeunParams::real(3.0, 0.2, 0.3, 0.6, 0.45, 0.3).unwrap());
        let path = ContinuationPath::new(vec![c(-2.0, 0.5), c(1.3, 0.3)], 0.05).unwrap();
        assert!(matches!(
            connection_matrix(&p, SingularPoint::Zero, SingularPoint::One, &path, 1e-12),
            Err(HeunError::OutsideDisc { .. })
        ));
    }

    #[test]
    fn json_embeds_path() {
        let p = EquationParams::General(HeunParams::real(3.0, 0.2, 0.3, 0.6, 0.45, 0.3).unwrap());
        let path = ContinuationPath::new(vec![c(0.5, 0.0), c(0.5, 0.0)], 0.05).unwrap();
        let cm = connection_matrix(&p, SingularPoint::Zero, SingularPoint::One, &path, 1e-12).unwrap();
        let v = serde_json::to_value(&cm).unwrap();
        assert_eq!(v["from_point"], "0");
        assert_eq!(v["path"]["waypoints"], serde_json::json!([[0.5, 0.0], [0.5, 0.0]]));
    }
}
