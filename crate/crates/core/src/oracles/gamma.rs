use std::f64::consts::PI;

use crate::numeric::C64;

const G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(z) for complex `z` (Lanczos, g = 7, with reflection for Re z < 1/2).
pub fn complex_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        return PI / ((z * PI).sin() * complex_gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_and_half() {
        for (n, f) in [(1.0, 1.0), (2.0, 1.0), (5.0, 24.0), (10.0, 362_880.0)] {
            let g = complex_gamma(C64::new(n, 0.0));
            assert!((g.re - f).abs() < 1e-13 * f && g.im.abs() < 1e-13 * f);
        }
        let g = complex_gamma(C64::new(0.5, 0.0));
        assert!((g.re - PI.sqrt()).abs() < 1e-14);
        let g = complex_gamma(C64::new(-0.5, 0.0));
        assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn recurrence_on_complex_arguments() {
        for z in [C64::new(0.3, 1.7), C64::new(-2.4, 0.6), C64::new(3.1, -2.2)] {
            let lhs = complex_gamma(z + 1.0);
            let rhs = z * complex_gamma(z);
            assert!((lhs - rhs).norm() < 1e-13 * lhs.norm());
        }
    }
}
