//! Gauss hypergeometric function: direct series and an independent ODE mode.

use crate::error::{HeunError, Result};
use crate::numeric::C64;

use super::gamma::complex_gamma;

const SERIES_MAX_TERMS: usize = 20_000;
const SERIES_TAIL: f64 = 1e-16;

fn check_c(c: C64) -> Result<()> {
    if c.im.abs() < 1e-14 && c.re <= 0.0 && (c.re - c.re.round()).abs() < 1e-14 {
        return Err(HeunError::PoleInC(format!("{c}")));
    }
    Ok(())
}

/// Value and derivative of the series, with the realised tail bound.
fn series(a: C64, b: C64, c: C64, z: C64) -> Result<(C64, C64, f64)> {
    check_c(c)?;
    if z.norm() > 0.75 + 1e-15 {
        return Err(HeunError::OutsideSeriesDomain(z.norm()));
    }
    let one = C64::new(1.0, 0.0);
    let (mut sum, mut dsum) = (one, C64::default());
    let mut coeff = one; // (a)_k (b)_k / ((c)_k k!)
    let mut zpow_km1 = one; // z^{k-1}
    let (na, nb, nc) = (a.norm(), b.norm(), c.norm());
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        coeff = coeff * (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0));
        let k1 = kf + 1.0;
        dsum += coeff * k1 * zpow_km1;
        zpow_km1 *= z;
        let term = coeff * zpow_km1;
        sum += term;
        if coeff == C64::default() {
            return Ok((sum, dsum, 0.0));
        }
        // sup over j > k+1 of the term ratio, valid once j > |c|
        let j = k1 + 1.0;
        if j > 2.0 * nc + 1.0 {
            let r = z.norm() * (1.0 + na / j) * (1.0 + nb / j) / (1.0 - nc / j);
            if r < 1.0 {
                let tail = term.norm() * r / (1.0 - r);
                let dtail = term.norm() / z.norm().max(1e-300) * j * r / ((1.0 - r) * (1.0 - r));
                if tail <= SERIES_TAIL * sum.norm().max(1.0) && dtail <= SERIES_TAIL * dsum.norm().max(1.0) {
                    return Ok((sum, dsum, tail));
                }
            }
        }
    }
    Err(HeunError::OracleNotConverged("2F1 series exhausted".into()))
}

/// `2F1(a, b; c; z)` by direct summation, `|z| ≤ 0.75`.
pub fn gauss_2f1(a: C64, b: C64, c: C64, z: C64) -> Result<C64> {
    series(a, b, c, z).map(|(v, _, _)| v)
}

/// The hypergeometric equation `z(1-z)w'' + [c - (a+b+1)z]w' - ab w = 0`
/// integrated with fixed-step classical RK4 along polylines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Ode {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    /// RK4 steps per unit of path length.
    pub steps_per_unit: usize,
}

impl Hyp2F1Ode {
    pub fn new(a: C64, b: C64, c: C64) -> Result<Self> {
        check_c(c)?;
        Ok(Hyp2F1Ode { a, b, c, steps_per_unit: 4000 })
    }

    fn accel(&self, z: C64, w: C64, wp: C64) -> C64 {
        (self.a * self.b * w - (self.c - (self.a + self.b + 1.0) * z) * wp) / (z * (1.0 - z))
    }

    /// Carries `(w, w')` from `points[0]` along the polyline.
    pub fn integrate(&self, points: &[C64], w: C64, wp: C64) -> (C64, C64) {
        let (mut w, mut wp) = (w, wp);
        for seg in points.windows(2) {
            let dz = seg[1] - seg[0];
            let n = ((dz.norm() * self.steps_per_unit as f64).ceil() as usize).max(1);
            let h = dz / n as f64;
            let mut z = seg[0];
            for _ in 0..n {
                let k1 = (wp, self.accel(z, w, wp));
                let (w2, p2) = (w + h * 0.5 * k1.0, wp + h * 0.5 * k1.1);
                let k2 = (p2, self.accel(z + h * 0.5, w2, p2));
                let (w3, p3) = (w + h * 0.5 * k2.0, wp + h * 0.5 * k2.1);
                let k3 = (p3, self.accel(z + h * 0.5, w3, p3));
                let (w4, p4) = (w + h * k3.0, wp + h * k3.1);
                let k4 = (p4, self.accel(z + h, w4, p4));
                w += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                wp += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                z += h;
            }
        }
        (w, wp)
    }

    /// `[F(a,b;c;z), z^{1-c} F(a-c+1, b-c+1; 2-c; z)]` with derivatives, `|z| ≤ 0.75`.
    pub fn basis_at_zero(&self, z: C64) -> Result<[(C64, C64); 2]> {
        let (a, b, c) = (self.a, self.b, self.c);
        let (f, fp, _) = series(a, b, c, z)?;
        let (g, gp, _) = series(a - c + 1.0, b - c + 1.0, 2.0 - c, z)?;
        let e = 1.0 - c;
        let pw = (e * z.ln()).exp();
        Ok([(f, fp), (pw * g, pw * (gp + e * g / z))])
    }

    /// `[F(a,b;a+b-c+1;1-z), (1-z)^{c-a-b} F(c-a, c-b; c-a-b+1; 1-z)]`, `|1-z| ≤ 0.75`.
    pub fn basis_at_one(&self, z: C64) -> Result<[(C64, C64); 2]> {
        let (a, b, c) = (self.a, self.b, self.c);
        let u = 1.0 - z;
        let (f, fp, _) = series(a, b, a + b - c + 1.0, u)?;
        let (g, gp, _) = series(c - a, c - b, c - a - b + 1.0, u)?;
        let e = c - a - b;
        let pw = (e * u.ln()).exp();
        // d/dz = -d/du
        Ok([(f, -fp), (pw * g, -pw * (gp + e * g / u))])
    }

    /// Value of `F(a,b;c;z)` at any `z` reachable by the polyline from the
    /// series seed `points[0]` (|points[0]| ≤ 0.75).
    pub fn value_along(&self, points: &[C64]) -> Result<(C64, C64)> {
        let [(f, fp), _] = self.basis_at_zero(points[0])?;
        Ok(self.integrate(points, f, fp))
    }

    /// Connection coefficients `[[A1, A2], [B1, B2]]` expressing the z = 0
    /// basis in the z = 1 basis, by continuing along `points` (start within
    /// 0.75 of 0, end within 0.75 of 1) and solving at the end point.
    pub fn connection_by_integration(&self, points: &[C64]) -> Result<[[C64; 2]; 2]> {
        let start = points[0];
        let end = *points.last().unwrap();
        let zero = self.basis_at_zero(start)?;
        let carried: Vec<(C64, C64)> = zero.iter().map(|&(w, wp)| self.integrate(points, w, wp)).collect();
        let [(u1, u1p), (u2, u2p)] = self.basis_at_one(end)?;
        let det = u1 * u2p - u2 * u1p;
        let mut m = [[C64::default(); 2]; 2];
        for (j, &(w, wp)) in carried.iter().enumerate() {
            m[0][j] = (w * u2p - u2 * wp) / det;
            m[1][j] = (u1 * wp - w * u1p) / det;
        }
        Ok(m)
    }

    /// The same coefficients from the classical Gamma-function formulas.
    pub fn connection_by_gamma(&self) -> [[C64; 2]; 2] {
        let (a, b, c) = (self.a, self.b, self.c);
        let g = complex_gamma;
        let one = C64::new(1.0, 0.0);
        [
            [
                g(c) * g(c - a - b) / (g(c - a) * g(c - b)),
                g(2.0 - c) * g(c - a - b) / (g(one - a) * g(one - b)),
            ],
            [
                g(c) * g(a + b - c) / (g(a) * g(b)),
                g(2.0 - c) * g(a + b - c) / (g(a - c + 1.0) * g(b - c + 1.0)),
            ],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn binomial_identity() {
        let v = gauss_2f1(c(2.0, 0.0), c(3.0, 0.0), c(3.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((v - 4.0).norm() < 1e-14);
    }

    #[test]
    fn logarithm_identity() {
        let v = gauss_2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((v.re - 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((v.re - 1.386_294_4).abs() < 1e-7);
        let z = c(0.3, -0.4);
        let v = gauss_2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), z).unwrap();
        assert!((v + (1.0 - z).ln() / z).norm() < 1e-14);
    }

    #[test]
    fn terminating_series() {
        for z in [c(0.1, 0.2), c(-0.7, 0.0), c(0.0, 0.74)] {
            assert_eq!(gauss_2f1(C64::default(), c(2.5, 1.0), c(0.3, 0.0), z).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(gauss_2f1(c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0), c(0.1, 0.0)), Err(HeunError::PoleInC(_))));
        assert!(matches!(
            gauss_2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.8, 0.0)),
            Err(HeunError::OutsideSeriesDomain(_))
        ));
    }

    #[test]
    fn series_and_ode_modes_agree() {
        let ode = Hyp2F1Ode::new(c(0.3, 0.2), c(-0.7, 0.1), c(1.35, -0.2)).unwrap();
        let path = [c(0.2, 0.0), c(0.4, 0.4), c(-0.3, 0.6)];
        let (w, wp) = ode.value_along(&path).unwrap();
        let (f, fp, _) = series(ode.a, ode.b, ode.c, path[2]).unwrap();
        assert!((w - f).norm() < 1e-10 * f.norm());
        assert!((wp - fp).norm() < 1e-10 * fp.norm());
    }

    #[test]
    fn ode_connection_matches_gamma_formula() {
        let ode = Hyp2F1Ode::new(c(0.3, 0.2), c(-0.7, 0.1), c(1.35, -0.2)).unwrap();
        let got = ode.connection_by_integration(&[c(0.3, 0.0), c(0.5, 0.1), c(0.7, 0.0)]).unwrap();
        let want = ode.connection_by_gamma();
        for i in 0..2 {
            for j in 0..2 {
                assert!((got[i][j] - want[i][j]).norm() < 1e-10 * want[i][j].norm().max(1.0), "{i}{j}");
            }
        }
    }
}
