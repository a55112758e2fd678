//! Small numeric helpers shared by the series and integration kernels.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Working precision of the numeric kernels. Only binary64 is implemented;
/// the parameter exists so that error estimates do not hard-code epsilon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Precision {
    #[default]
    Binary64,
}

impl Precision {
    pub fn epsilon(self) -> f64 {
        match self {
            Precision::Binary64 => f64::EPSILON,
        }
    }
}

/// Kahan-Babuska (Neumaier) compensated sum over complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: C64,
    comp: C64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: C64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

#[inline]
fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

pub fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * d.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// True when `x` is within `tol` of an integer.
pub fn near_integer(x: C64, tol: f64) -> bool {
    x.im.abs() <= tol && (x.re - x.re.round()).abs() <= tol
}

/// 2x2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(#[serde(with = "mat_serde")] pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn from_columns(c0: [C64; 2], c1: [C64; 2]) -> Self {
        Mat2([[c0[0], c1[0]], [c0[1], c1[1]]])
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == ZERO || !is_finite(d) {
            return None;
        }
        let m = &self.0;
        Some(Mat2([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut r = [[ZERO; 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Condition number in the Frobenius norm.
    pub fn condition(&self) -> f64 {
        match self.inverse() {
            Some(inv) => self.norm() * inv.norm(),
            None => f64::INFINITY,
        }
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        let mut r = self.0;
        for (row, other) in r.iter_mut().zip(&o.0) {
            for (x, y) in row.iter_mut().zip(other) {
                *x -= y;
            }
        }
        Mat2(r)
    }

    pub fn eigenvalues(&self) -> [C64; 2] {
        let tr = self.0[0][0] + self.0[1][1];
        let disc = (tr * tr - 4.0 * self.det()).sqrt();
        let (l1, l2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
        // recompute the smaller root from the product to avoid cancellation
        if l1.norm() >= l2.norm() && l1 != ZERO {
            [l1, self.det() / l1]
        } else if l2 != ZERO {
            [self.det() / l2, l2]
        } else {
            [l1, l2]
        }
    }
}

/// Serde adapter writing a complex number as `[re, im]`.
pub mod cserde {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

/// Serde adapter for complex sequences as lists of `[re, im]`.
pub mod cvec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(v.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

mod mat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[[C64; 2]; 2], s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[[C64; 2]; 2], D::Error> {
        let m = <[[[f64; 2]; 2]; 2]>::deserialize(d)?;
        Ok(m.map(|row| row.map(|[re, im]| C64::new(re, im))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(C64::new(1.0, 0.0));
        for _ in 0..1000 {
            s.add(C64::new(1e-17, -1e-17));
        }
        s.add(C64::new(-1.0, 0.0));
        assert!((s.value() - C64::new(1e-14, -1e-14)).norm() < 1e-24);
    }

    #[test]
    fn mat2_inverse_and_eigenvalues() {
        let m = Mat2([[C64::new(2.0, 0.0), ONE], [ZERO, C64::new(-1.0, 0.0)]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).sub(&Mat2::IDENTITY).norm() < 1e-15);
        let ev = m.eigenvalues();
        assert!((ev[0] - 2.0).norm() < 1e-15 && (ev[1] + 1.0).norm() < 1e-15);
    }

    #[test]
    fn segment_distance() {
        let d = point_segment_distance(C64::new(0.5, 1.0), ZERO, ONE);
        assert!((d - 1.0).abs() < 1e-15);
        let d = point_segment_distance(C64::new(2.0, 0.0), ZERO, ONE);
        assert!((d - 1.0).abs() < 1e-15);
    }
}
