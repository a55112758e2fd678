//! Parameter records for the general and confluent Heun equations, the
//! Fuchs relation and the singular-point classification.
//!
//! General form:
//! `y'' + (γ/z + δ/(z-1) + ε/(z-a)) y' + (αβ z - q)/(z(z-1)(z-a)) y = 0`
//!
//! Confluent form:
//! `H'' + (α + (β+1)/z + (γ+1)/(z-1)) H' + (μ/z + ν/(z-1)) H = 0`

use serde::{Deserialize, Serialize};

use crate::error::{HeunError, Result};
use crate::numeric::{cserde, is_finite, near_integer, C64, ONE, ZERO};

/// Tolerance used to flag exponent pairs with an integer difference.
pub const INTEGER_TOL: f64 = 1e-12;

/// δ forced by the Fuchs relation at infinity (exponents α, β there).
pub fn fuchs_delta(alpha: C64, beta: C64, gamma: C64, epsilon: C64) -> C64 {
    alpha + beta - gamma - epsilon + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HeunParamsInput")]
pub struct HeunParams {
    #[serde(with = "cserde")]
    a: C64,
    #[serde(with = "cserde")]
    q: C64,
    #[serde(with = "cserde")]
    alpha: C64,
    #[serde(with = "cserde")]
    beta: C64,
    #[serde(with = "cserde")]
    gamma: C64,
    #[serde(with = "cserde")]
    epsilon: C64,
    #[serde(with = "cserde")]
    delta: C64,
}

#[derive(Deserialize)]
struct HeunParamsInput {
    #[serde(with = "cserde")]
    a: C64,
    #[serde(with = "cserde")]
    q: C64,
    #[serde(with = "cserde")]
    alpha: C64,
    #[serde(with = "cserde")]
    beta: C64,
    #[serde(with = "cserde")]
    gamma: C64,
    #[serde(with = "cserde")]
    epsilon: C64,
}

impl TryFrom<HeunParamsInput> for HeunParams {
    type Error = HeunError;

    fn try_from(p: HeunParamsInput) -> Result<Self> {
        HeunParams::new(p.a, p.q, p.alpha, p.beta, p.gamma, p.epsilon)
    }
}

impl HeunParams {
    /// Builds the record and stores δ from the Fuchs relation.
    pub fn new(a: C64, q: C64, alpha: C64, beta: C64, gamma: C64, epsilon: C64) -> Result<Self> {
        for (name, v) in [
            ("a", a),
            ("q", q),
            ("alpha", alpha),
            ("beta", beta),
            ("gamma", gamma),
            ("epsilon", epsilon),
        ] {
            if !is_finite(v) {
                return Err(HeunError::NonFinite(name));
            }
        }
        if a == ZERO || a == ONE {
            return Err(HeunError::DegenerateParams(format!("{a}")));
        }
        Ok(HeunParams {
            a,
            q,
            alpha,
            beta,
            gamma,
            epsilon,
            delta: fuchs_delta(alpha, beta, gamma, epsilon),
        })
    }

    /// Real-parameter convenience constructor.
    pub fn real(a: f64, q: f64, alpha: f64, beta: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        Self::new(a.into(), q.into(), alpha.into(), beta.into(), gamma.into(), epsilon.into())
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn gamma(&self) -> C64 {
        self.gamma
    }

    pub fn epsilon(&self) -> C64 {
        self.epsilon
    }

    /// δ as fixed by the Fuchs relation at construction.
    pub fn delta(&self) -> C64 {
        self.delta
    }

    /// Parameters of the equation in `u = 1 - z`, which moves z = 1 to the origin.
    pub fn about_one(&self) -> HeunParams {
        let ab = self.alpha * self.beta;
        HeunParams {
            a: ONE - self.a,
            q: ab - self.q,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.delta,
            epsilon: self.epsilon,
            delta: self.gamma,
        }
    }

    /// Parameters of the equation in `u = (z - a)/(1 - a)`, which moves z = a
    /// to the origin and keeps z = 1 fixed.
    pub fn about_a(&self) -> HeunParams {
        let ab = self.alpha * self.beta;
        HeunParams {
            a: self.a / (self.a - 1.0),
            q: (self.q - ab * self.a) / (ONE - self.a),
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.epsilon,
            epsilon: self.gamma,
            delta: self.delta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfluentParamsInput")]
pub struct ConfluentParams {
    #[serde(with = "cserde")]
    pub alpha: C64,
    #[serde(with = "cserde")]
    pub beta: C64,
    #[serde(with = "cserde")]
    pub gamma: C64,
    #[serde(with = "cserde")]
    pub mu: C64,
    #[serde(with = "cserde")]
    pub nu: C64,
}

#[derive(Deserialize)]
struct ConfluentParamsInput {
    #[serde(with = "cserde")]
    alpha: C64,
    #[serde(with = "cserde")]
    beta: C64,
    #[serde(with = "cserde")]
    gamma: C64,
    #[serde(with = "cserde")]
    mu: C64,
    #[serde(with = "cserde")]
    nu: C64,
}

impl TryFrom<ConfluentParamsInput> for ConfluentParams {
    type Error = HeunError;

    fn try_from(p: ConfluentParamsInput) -> Result<Self> {
        ConfluentParams::new(p.alpha, p.beta, p.gamma, p.mu, p.nu)
    }
}

impl ConfluentParams {
    pub fn new(alpha: C64, beta: C64, gamma: C64, mu: C64, nu: C64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("mu", mu), ("nu", nu)] {
            if !is_finite(v) {
                return Err(HeunError::NonFinite(name));
            }
        }
        Ok(ConfluentParams { alpha, beta, gamma, mu, nu })
    }

    pub fn real(alpha: f64, beta: f64, gamma: f64, mu: f64, nu: f64) -> Result<Self> {
        Self::new(alpha.into(), beta.into(), gamma.into(), mu.into(), nu.into())
    }

    /// Parameters of the equation in `u = 1 - z`.
    pub fn about_one(&self) -> ConfluentParams {
        ConfluentParams {
            alpha: -self.alpha,
            beta: self.gamma,
            gamma: self.beta,
            mu: -self.nu,
            nu: -self.mu,
        }
    }

    /// Parameters for `G` in `H = e^{-αz} G`, the solution family carrying
    /// the exponential factor at infinity.
    pub fn exponential_twin(&self) -> ConfluentParams {
        ConfluentParams {
            alpha: -self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            mu: self.mu - self.alpha * (self.beta + 1.0),
            nu: self.nu - self.alpha * (self.gamma + 1.0),
        }
    }
}

/// Either equation class, as read from a parameter file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EquationParams {
    General(HeunParams),
    Confluent(ConfluentParams),
}

/// Where a singular point sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Finite(#[serde(with = "cserde")] C64),
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    Regular,
    Irregular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityInfo {
    pub location: Location,
    pub kind: SingularityKind,
    /// Characteristic exponents; `None` at an irregular point.
    pub exponents: Option<[C64; 2]>,
    /// Exponent difference is an integer (logarithmic solutions possible).
    pub degenerate: bool,
}

impl SingularityInfo {
    fn regular(location: Location, e0: C64, e1: C64) -> Self {
        SingularityInfo {
            location,
            kind: SingularityKind::Regular,
            exponents: Some([e0, e1]),
            degenerate: near_integer(e1 - e0, INTEGER_TOL),
        }
    }
}

/// Singular points in the fixed order {0, 1, a, ∞} (general) or {0, 1, ∞}
/// (confluent).
pub trait Classify {
    fn classify_singularities(&self) -> Vec<SingularityInfo>;
}

impl Classify for HeunParams {
    fn classify_singularities(&self) -> Vec<SingularityInfo> {
        vec![
            SingularityInfo::regular(Location::Finite(ZERO), ZERO, ONE - self.gamma),
            SingularityInfo::regular(Location::Finite(ONE), ZERO, ONE - self.delta),
            SingularityInfo::regular(Location::Finite(self.a), ZERO, ONE - self.epsilon),
            SingularityInfo::regular(Location::Infinity, self.alpha, self.beta),
        ]
    }
}

impl Classify for ConfluentParams {
    fn classify_singularities(&self) -> Vec<SingularityInfo> {
        vec![
            SingularityInfo::regular(Location::Finite(ZERO), ZERO, -self.beta),
            SingularityInfo::regular(Location::Finite(ONE), ZERO, -self.gamma),
            SingularityInfo {
                location: Location::Infinity,
                kind: SingularityKind::Irregular,
                exponents: None,
                degenerate: false,
            },
        ]
    }
}

impl Classify for EquationParams {
    fn classify_singularities(&self) -> Vec<SingularityInfo> {
        match self {
            EquationParams::General(p) => p.classify_singularities(),
            EquationParams::Confluent(p) => p.classify_singularities(),
        }
    }
}

/// A second-order linear ODE `y'' + p(z) y' + q(z) y = 0` with finitely many
/// finite singular points.
pub trait Equation: Sync {
    fn coeff_p(&self, z: C64) -> C64;
    fn coeff_q(&self, z: C64) -> C64;
    fn finite_singularities(&self) -> Vec<C64>;

    /// `exp(∫p dz)` written as `exp(c z) · Π (z - s_k)^{e_k}`; returns `(c, [(s_k, e_k)])`.
    fn abel_exponents(&self) -> (C64, Vec<(C64, C64)>);

    /// `y''` eliminated through the ODE.
    fn second_derivative(&self, z: C64, y: C64, yp: C64) -> C64 {
        -self.coeff_p(z) * yp - self.coeff_q(z) * y
    }
}

impl Equation for HeunParams {
    fn coeff_p(&self, z: C64) -> C64 {
        self.gamma / z + self.delta / (z - 1.0) + self.epsilon / (z - self.a)
    }

    fn coeff_q(&self, z: C64) -> C64 {
        (self.alpha * self.beta * z - self.q) / (z * (z - 1.0) * (z - self.a))
    }

    fn finite_singularities(&self) -> Vec<C64> {
        vec![ZERO, ONE, self.a]
    }

    fn abel_exponents(&self) -> (C64, Vec<(C64, C64)>) {
        (ZERO, vec![(ZERO, self.gamma), (ONE, self.delta), (self.a, self.epsilon)])
    }
}

impl Equation for ConfluentParams {
    fn coeff_p(&self, z: C64) -> C64 {
        self.alpha + (self.beta + 1.0) / z + (self.gamma + 1.0) / (z - 1.0)
    }

    fn coeff_q(&self, z: C64) -> C64 {
        self.mu / z + self.nu / (z - 1.0)
    }

    fn finite_singularities(&self) -> Vec<C64> {
        vec![ZERO, ONE]
    }

    fn abel_exponents(&self) -> (C64, Vec<(C64, C64)>) {
        (self.alpha, vec![(ZERO, self.beta + 1.0), (ONE, self.gamma + 1.0)])
    }
}

impl Equation for EquationParams {
    fn coeff_p(&self, z: C64) -> C64 {
        match self {
            EquationParams::General(e) => e.coeff_p(z),
            EquationParams::Confluent(e) => e.coeff_p(z),
        }
    }

    fn coeff_q(&self, z: C64) -> C64 {
        match self {
            EquationParams::General(e) => e.coeff_q(z),
            EquationParams::Confluent(e) => e.coeff_q(z),
        }
    }

    fn finite_singularities(&self) -> Vec<C64> {
        match self {
            EquationParams::General(e) => e.finite_singularities(),
            EquationParams::Confluent(e) => e.finite_singularities(),
        }
    }

    fn abel_exponents(&self) -> (C64, Vec<(C64, C64)>) {
        match self {
            EquationParams::General(e) => e.abel_exponents(),
            EquationParams::Confluent(e) => e.abel_exponents(),
        }
    }
}

/// Smallest distance between two distinct finite singular points.
pub fn min_singularity_gap<E: Equation + ?Sized>(eq: &E) -> f64 {
    let s = eq.finite_singularities();
    let mut gap = f64::INFINITY;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            gap = gap.min((s[i] - s[j]).norm());
        }
    }
    gap
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fuchs_delta_examples() {
        assert_eq!(fuchs_delta(ONE, ONE, ONE, ONE), ONE);
        assert_eq!(fuchs_delta(ZERO, ZERO, ONE, ZERO), ZERO);
    }

    #[test]
    fn fuchs_relation_makes_infinity_regular_with_exponents_alpha_beta() {
        // y ~ z^{-r}: leading balance r^2 - r(γ+δ+ε-1) + αβ = 0 must vanish at r = α and r = β.
        let cases = [
            (c(0.3, 0.1), c(-1.2, 0.7), c(0.45, -0.2), c(2.1, 0.3)),
            (c(1.7, -0.4), c(0.2, 0.0), c(-0.6, 1.1), c(0.0, -0.9)),
        ];
        for (al, be, ga, ep) in cases {
            let de = fuchs_delta(al, be, ga, ep);
            for r in [al, be] {
                let res = r * r - r * (ga + de + ep - 1.0) + al * be;
                assert!(res.norm() < 1e-12, "{res}");
            }
        }
    }

    #[test]
    fn construction_rejects_coalescing_points() {
        assert!(matches!(HeunParams::real(0.0, 1.0, 1.0, 1.0, 1.0, 1.0), Err(HeunError::DegenerateParams(_))));
        assert!(matches!(HeunParams::real(1.0, 1.0, 1.0, 1.0, 1.0, 1.0), Err(HeunError::DegenerateParams(_))));
        assert!(matches!(
            HeunParams::real(2.0, f64::NAN, 1.0, 1.0, 1.0, 1.0),
            Err(HeunError::NonFinite("q"))
        ));
    }

    #[test]
    fn classify_general() {
        let p = HeunParams::real(2.0, 0.3, 0.5, 0.7, 1.0, 0.2).unwrap();
        let s = p.classify_singularities();
        assert_eq!(s.len(), 4);
        assert_eq!(s[0].location, Location::Finite(ZERO));
        assert_eq!(s[1].location, Location::Finite(ONE));
        assert_eq!(s[2].location, Location::Finite(c(2.0, 0.0)));
        assert_eq!(s[3].location, Location::Infinity);
        assert!(s.iter().all(|x| x.kind == SingularityKind::Regular));
        assert_eq!(s[0].exponents, Some([ZERO, ZERO]));
        assert!(s[0].degenerate);
        let total: C64 = s.iter().flat_map(|x| x.exponents.unwrap()).sum();
        assert!((total - 2.0).norm() < 1e-12);
    }

    #[test]
    fn classify_confluent() {
        let p = ConfluentParams::real(1.0, 0.5, 0.3, 0.2, 0.1).unwrap();
        let s = p.classify_singularities();
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].exponents, Some([ZERO, c(-0.5, 0.0)]));
        assert!(!s[0].degenerate);
        assert_eq!(s[2].kind, SingularityKind::Irregular);
        assert_eq!(s[2].exponents, None);
    }

    #[test]
    fn json_roundtrip_emits_and_ignores_delta() {
        let p = HeunParams::new(c(2.0, 0.5), c(0.1, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.3, 0.0), c(0.2, 0.0)).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"delta\""));
        let mut v: serde_json::Value = serde_json::from_str(&s).unwrap();
        v["delta"] = serde_json::json!([99.0, 0.0]);
        let back: HeunParams = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);

        let bad = r#"{"a":[1,0],"q":[0,0],"alpha":[0,0],"beta":[0,0],"gamma":[0,0],"epsilon":[0,0]}"#;
        assert!(serde_json::from_str::<HeunParams>(bad).is_err());

        let conf = r#"{"alpha":[1,0],"beta":[0,0],"gamma":[1,0],"mu":[1,0],"nu":[0,0]}"#;
        match serde_json::from_str::<EquationParams>(conf).unwrap() {
            EquationParams::Confluent(cp) => assert_eq!(cp.mu, ONE),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn transformed_parameters_keep_fuchs_relation() {
        let p = HeunParams::new(c(2.0, 0.5), c(0.1, 0.3), c(1.0, 0.2), c(0.5, 0.0), c(0.3, 0.0), c(0.2, -0.1)).unwrap();
        for t in [p.about_one(), p.about_a()] {
            let d = fuchs_delta(t.alpha, t.beta, t.gamma, t.epsilon);
            assert!((d - t.delta()).norm() < 1e-14);
        }
    }
}
