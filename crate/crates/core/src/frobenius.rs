//! Local Frobenius solutions about the regular singular points.
//!
//! Every expansion is carried out in a local variable `u = s·(z - z0)` in
//! which the expansion point sits at the origin and the equation keeps its
//! canonical form (affine change of variable, parameters remapped), so one
//! recurrence per equation class serves all three points.

use serde::{Deserialize, Serialize};

use crate::error::{HeunError, Result};
use crate::numeric::{cserde, near_integer, CompensatedSum, Precision, C64, ONE, ZERO};
use crate::params::{ConfluentParams, EquationParams, HeunParams, INTEGER_TOL};

/// Hard cap on `|z - z0| / radius` for direct series evaluation.
pub const DISC_FRACTION: f64 = 0.9;
/// Factor applied to the observed term ratio before bounding the tail.
pub const RATIO_INFLATION: f64 = 1.25;
/// Default number of coefficients generated by the convenience constructors.
pub const DEFAULT_TERMS: usize = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingularPoint {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "a")]
    A,
}

impl SingularPoint {
    pub fn label(self) -> &'static str {
        match self {
            SingularPoint::Zero => "0",
            SingularPoint::One => "1",
            SingularPoint::A => "a",
        }
    }
}

impl std::str::FromStr for SingularPoint {
    type Err = HeunError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(SingularPoint::Zero),
            "1" => Ok(SingularPoint::One),
            "a" => Ok(SingularPoint::A),
            _ => Err(HeunError::InvalidInput(format!("unknown singular point `{s}` (expected 0, 1 or a)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Exponent 0.
    First,
    /// The non-zero exponent (1-γ, 1-δ, 1-ε for the general equation; -β, -γ confluent).
    /// Experimental at `z = a`: no application here relies on it.
    Second,
}

impl std::str::FromStr for Branch {
    type Err = HeunError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Branch::First),
            "second" => Ok(Branch::Second),
            _ => Err(HeunError::InvalidInput(format!("unknown branch `{s}` (expected first or second)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    #[serde(with = "cserde")]
    pub value: C64,
    #[serde(with = "cserde")]
    pub derivative: C64,
    pub est_error: f64,
    #[serde(rename = "n_terms")]
    pub n_terms_used: usize,
}

/// `z^σ · Σ c_k u^k` about one regular singular point, with `u = scale·(z - z0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusSolution {
    equation: EquationParams,
    local: EquationParams,
    point: SingularPoint,
    branch: Branch,
    expansion_point: C64,
    scale: C64,
    exponent: C64,
    coeffs: Vec<C64>,
    radius: f64,
    precision: Precision,
}

/// Local solution of the general equation about `point`.
pub fn general_series(params: &HeunParams, point: SingularPoint, branch: Branch, n: usize) -> Result<FrobeniusSolution> {
    let a = params.a();
    if a == ZERO || a == ONE {
        return Err(HeunError::DegenerateParams(format!("{a}")));
    }
    let (local, z0, scale, radius) = match point {
        SingularPoint::Zero => (*params, ZERO, ONE, a.norm().min(1.0)),
        SingularPoint::One => (params.about_one(), ONE, -ONE, (a - 1.0).norm().min(1.0)),
        SingularPoint::A => (params.about_a(), a, ONE / (ONE - a), a.norm().min((a - 1.0).norm())),
    };
    let exponent = match branch {
        Branch::First => ZERO,
        Branch::Second => ONE - local.gamma(),
    };
    check_branch(branch, ONE - local.gamma(), point)?;
    let coeffs = general_coefficients(&local, exponent, n.max(2))?;
    Ok(FrobeniusSolution {
        equation: EquationParams::General(*params),
        local: EquationParams::General(local),
        point,
        branch,
        expansion_point: z0,
        scale,
        exponent,
        coeffs,
        radius,
        precision: Precision::Binary64,
    })
}

/// Local solution of the confluent equation about 0 or 1.
pub fn confluent_series(
    params: &ConfluentParams,
    point: SingularPoint,
    branch: Branch,
    n: usize,
) -> Result<FrobeniusSolution> {
    let (local, z0, scale) = match point {
        SingularPoint::Zero => (*params, ZERO, ONE),
        SingularPoint::One => (params.about_one(), ONE, -ONE),
        SingularPoint::A => {
            return Err(HeunError::InvalidInput("the confluent equation has no singular point `a`".into()))
        }
    };
    let exponent = match branch {
        Branch::First => ZERO,
        Branch::Second => -local.beta,
    };
    check_branch(branch, -local.beta, point)?;
    let coeffs = confluent_coefficients(&local, exponent, n.max(2))?;
    Ok(FrobeniusSolution {
        equation: EquationParams::Confluent(*params),
        local: EquationParams::Confluent(local),
        point,
        branch,
        expansion_point: z0,
        scale,
        exponent,
        coeffs,
        radius: 1.0,
        precision: Precision::Binary64,
    })
}

/// Local solution of either class.
pub fn local_series(eq: &EquationParams, point: SingularPoint, branch: Branch, n: usize) -> Result<FrobeniusSolution> {
    match eq {
        EquationParams::General(p) => general_series(p, point, branch, n),
        EquationParams::Confluent(p) => confluent_series(p, point, branch, n),
    }
}

fn check_branch(branch: Branch, second_exponent: C64, point: SingularPoint) -> Result<()> {
    if branch == Branch::Second && near_integer(second_exponent, INTEGER_TOL) {
        return Err(HeunError::LogarithmicCase(format!(
            "integer exponent difference {second_exponent} at z = {}",
            point.label()
        )));
    }
    Ok(())
}

fn small_divisor(d: C64, k: usize) -> Result<C64> {
    if d.norm() <= 1e-13 * (1.0 + (k * k) as f64) {
        return Err(HeunError::LogarithmicCase(format!(
            "recurrence divisor vanishes at k = {k}; exponent difference is an integer"
        )));
    }
    Ok(d)
}

/// Three-term recurrence of the general equation about the origin:
/// `a(k+1+σ)(k+σ+γ) c_{k+1} = [(1+a)(k+σ)(k+σ-1) + (γ(1+a)+δa+ε)(k+σ) + q] c_k
///                             - (k-1+σ+α)(k-1+σ+β) c_{k-1}`.
fn general_coefficients(p: &HeunParams, sigma: C64, n: usize) -> Result<Vec<C64>> {
    let (a, q, al, be, ga, de, ep) = (p.a(), p.q(), p.alpha(), p.beta(), p.gamma(), p.delta(), p.epsilon());
    let lin = ga * (ONE + a) + de * a + ep;
    let mut c = Vec::with_capacity(n + 1);
    c.push(ONE);
    for k in 0..n {
        let m = sigma + k as f64;
        let num = ((ONE + a) * m * (m - 1.0) + lin * m + q) * c[k]
            - if k > 0 { (m - 1.0 + al) * (m - 1.0 + be) * c[k - 1] } else { ZERO };
        let den = small_divisor(a * (m + 1.0) * (m + ga), k)?;
        c.push(num / den);
    }
    Ok(c)
}

/// Three-term recurrence of the confluent equation about the origin:
/// `(k+1+σ)(k+1+σ+β) c_{k+1} = [(k+σ)(k+σ-1) + (β+γ+2-α)(k+σ) - μ] c_k
///                              + [α(k-1+σ) + μ + ν] c_{k-1}`.
fn confluent_coefficients(p: &ConfluentParams, sigma: C64, n: usize) -> Result<Vec<C64>> {
    let lin = p.beta + p.gamma + 2.0 - p.alpha;
    let mut c = Vec::with_capacity(n + 1);
    c.push(ONE);
    for k in 0..n {
        let m = sigma + k as f64;
        let num = (m * (m - 1.0) + lin * m - p.mu) * c[k]
            + if k > 0 { (p.alpha * (m - 1.0) + p.mu + p.nu) * c[k - 1] } else { ZERO };
        let den = small_divisor((m + 1.0) * (m + 1.0 + p.beta), k)?;
        c.push(num / den);
    }
    Ok(c)
}

impl FrobeniusSolution {
    pub fn equation(&self) -> &EquationParams {
        &self.equation
    }

    /// Parameters of the equation in the local variable `u`.
    pub fn local_equation(&self) -> &EquationParams {
        &self.local
    }

    pub fn point(&self) -> SingularPoint {
        self.point
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn expansion_point(&self) -> C64 {
        self.expansion_point
    }

    /// `s` in `u = s·(z - z0)`.
    pub fn scale(&self) -> C64 {
        self.scale
    }

    pub fn exponent(&self) -> C64 {
        self.exponent
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Distance from the expansion point to the nearest other finite singularity.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Same solution with at least `n` coefficients.
    pub fn extended(&self, n: usize) -> Result<FrobeniusSolution> {
        if n < self.coeffs.len() {
            return Ok(self.clone());
        }
        let coeffs = match &self.local {
            EquationParams::General(p) => general_coefficients(p, self.exponent, n)?,
            EquationParams::Confluent(p) => confluent_coefficients(p, self.exponent, n)?,
        };
        Ok(FrobeniusSolution { coeffs, ..self.clone() })
    }

    /// Point at distance `fraction·radius` from the expansion point in direction `dir`.
    pub fn seed_point(&self, fraction: f64, dir: C64) -> C64 {
        self.expansion_point + dir / dir.norm() * (fraction * self.radius)
    }

    /// Value and derivative at `z`. `tol` is relative to the magnitude of
    /// the partial sum; `est_error` is an absolute bound on the value.
    pub fn eval_series(&self, z: C64, tol: f64) -> Result<EvalResult> {
        let s = self.sum(z, tol, false)?;
        Ok(EvalResult {
            value: s.value,
            derivative: s.derivative,
            est_error: s.est_error,
            n_terms_used: s.n_terms,
        })
    }

    /// Value, first and second derivative, the latter by term-wise
    /// differentiation of the series (independent of the ODE).
    pub fn eval_with_second(&self, z: C64, tol: f64) -> Result<(EvalResult, C64)> {
        let s = self.sum(z, tol, true)?;
        Ok((
            EvalResult {
                value: s.value,
                derivative: s.derivative,
                est_error: s.est_error,
                n_terms_used: s.n_terms,
            },
            s.second,
        ))
    }

    fn sum(&self, z: C64, tol: f64, want_second: bool) -> Result<SeriesSum> {
        let distance = (z - self.expansion_point).norm();
        let cap = DISC_FRACTION * self.radius;
        if distance > cap * (1.0 + 1e-12) {
            return Err(HeunError::OutsideDisc { distance, cap });
        }
        let u = self.scale * (z - self.expansion_point);
        let s = self.scale;
        let sigma = self.exponent;
        let c = &self.coeffs;

        if u == ZERO {
            if sigma != ZERO {
                return Err(HeunError::AtBranchPoint);
            }
            return Ok(SeriesSum {
                value: c[0],
                derivative: s * c[1],
                second: s * s * 2.0 * c.get(2).copied().unwrap_or(ZERO),
                est_error: 0.0,
                n_terms: 1,
            });
        }

        let local_radius = self.radius * s.norm();
        let asymptotic_ratio = u.norm() / local_radius;
        let eps = self.precision.epsilon();

        let mut s0 = CompensatedSum::new();
        let mut s1 = CompensatedSum::new();
        let mut s2 = CompensatedSum::new();
        let mut abs_sum = 0.0;
        let mut upow = ONE; // u^k
        let mut mags: Vec<f64> = Vec::with_capacity(c.len());
        let mut result = None;
        let mut last_bound = f64::INFINITY;

        for (k, &ck) in c.iter().enumerate() {
            let term = ck * upow;
            let kf = k as f64;
            s0.add(term);
            s1.add(term * kf / u);
            if want_second && k >= 2 {
                s2.add(term * (kf * (kf - 1.0)) / (u * u));
            }
            abs_sum += term.norm();
            mags.push(term.norm());
            upow *= u;

            if k >= 1 && ck == ZERO && c[k - 1] == ZERO {
                // two consecutive zero coefficients: the recurrence terminates
                result = Some((k, 0.0));
                break;
            }
            if k < 4 {
                continue;
            }
            let window = &mags[k - 4..=k];
            if window[..4].contains(&0.0) {
                continue;
            }
            let observed = window.windows(2).map(|w| w[1] / w[0]).fold(asymptotic_ratio, f64::max);
            let r = (RATIO_INFLATION * observed).min(0.5 * (1.0 + observed));
            if r >= 1.0 {
                continue;
            }
            let tail = window[4] * r / (1.0 - r);
            let dtail = window[4] / u.norm() * (kf * r / (1.0 - r) + r / ((1.0 - r) * (1.0 - r)));
            last_bound = tail / s0.value().norm().max(f64::MIN_POSITIVE);
            if tail <= tol * s0.value().norm() && dtail <= tol * s1.value().norm().max(s0.value().norm()) {
                result = Some((k, tail));
                break;
            }
        }

        let (k_used, tail) = result.ok_or(HeunError::NotConverged {
            tol,
            n_terms: c.len(),
            bound: last_bound,
        })?;

        let (sum0, sum1, sum2) = (s0.value(), s1.value(), s2.value());
        let (value, derivative, second, factor) = if sigma == ZERO {
            (sum0, s * sum1, s * s * sum2, ONE)
        } else {
            let f = (sigma * u.ln()).exp();
            let v = f * sum0;
            let d = f * (sum1 + sigma * sum0 / u);
            let dd = f * (sum2 + 2.0 * sigma * sum1 / u + sigma * (sigma - 1.0) * sum0 / (u * u));
            (v, s * d, s * s * dd, f)
        };
        let rounding = eps * (k_used as f64 + 1.0) * abs_sum;
        Ok(SeriesSum {
            value,
            derivative,
            second,
            est_error: (tail + rounding) * factor.norm(),
            n_terms: k_used + 1,
        })
    }
}

struct SeriesSum {
    value: C64,
    derivative: C64,
    second: C64,
    est_error: f64,
    n_terms: usize,
}

/// Free-function form of [`FrobeniusSolution::eval_series`].
pub fn eval_series(sol: &FrobeniusSolution, z: C64, tol: f64) -> Result<EvalResult> {
    sol.eval_series(z, tol)
}
