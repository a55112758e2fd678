#![allow(clippy::excessive_precision)]

//! Dormand-Prince 8(5,3) embedded pair for the complex first-order system
//! `(h, h')` along a real segment parameter `t ∈ [0, 1]`.

use crate::error::{HeunError, Result};
use crate::numeric::C64;

pub(crate) type State = [C64; 2];

const C: [f64; 12] = [
    0.0,
    0.526001519587677318785587544488e-01,
    0.789002279381515978178381316732e-01,
    0.118350341907227396726757197510,
    0.281649658092772603273242802490,
    0.333333333333333333333333333333,
    0.25,
    0.307692307692307692307692307692,
    0.651282051282051282051282051282,
    0.6,
    0.857142857142857142857142857142,
    1.0,
];

const A: [[f64; 11]; 12] = [
    [0.0; 11],
    [5.26001519587677318785587544488e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.97250569845378994544595329183e-2, 5.91751709536136983633785987549e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.95875854768068491816892993775e-2, 0.0, 8.87627564304205475450678981324e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        2.41365134159266685502369798665e-1,
        0.0,
        -8.84549479328286085344864962717e-1,
        9.24834003261792003115737966543e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7037037037037037037037037037e-2,
        0.0,
        0.0,
        1.70828608729473871279604482173e-1,
        1.25467687566822425016691814123e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7109375e-2,
        0.0,
        0.0,
        1.70252211019544039314978060272e-1,
        6.02165389804559606850219397283e-2,
        -1.7578125e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.70920001185047927108779319836e-2,
        0.0,
        0.0,
        1.70383925712239993810214054705e-1,
        1.07262030446373284651809199168e-1,
        -1.53194377486244017527936158236e-2,
        8.27378916381402288758473766002e-3,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        6.24110958716075717114429577812e-1,
        0.0,
        0.0,
        -3.36089262944694129406857109825,
        -8.68219346841726006818189891453e-1,
        2.75920996994467083049415600797e1,
        2.01540675504778934086186788979e1,
        -4.34898841810699588477366255144e1,
        0.0,
        0.0,
        0.0,
    ],
    [
        4.77662536438264365890433908527e-1,
        0.0,
        0.0,
        -2.48811461997166764192642586468,
        -5.90290826836842996371446475743e-1,
        2.12300514481811942347288949897e1,
        1.52792336328824235832596922938e1,
        -3.32882109689848629194453265587e1,
        -2.03312017085086261358222928593e-2,
        0.0,
        0.0,
    ],
    [
        -9.3714243008598732571704021658e-1,
        0.0,
        0.0,
        5.18637242884406370830023853209,
        1.09143734899672957818500254654,
        -8.14978701074692612513997267357,
        -1.85200656599969598641566180701e1,
        2.27394870993505042818970056734e1,
        2.49360555267965238987089396762,
        -3.0467644718982195003823669022,
        0.0,
    ],
    [
        2.27331014751653820792359768449,
        0.0,
        0.0,
        -1.05344954667372501984066689879e1,
        -2.00087205822486249909675718444,
        -1.79589318631187989172765950534e1,
        2.79488845294199600508499808837e1,
        -2.85899827713502369474065508674,
        -8.87285693353062954433549289258,
        1.23605671757943030647266201528e1,
        6.43392746015763530355970484046e-1,
    ],
];

const B: [f64; 12] = [
    5.42937341165687622380535766363e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566,
    1.89151789931450038304281599044,
    -5.8012039600105847814672114227,
    3.1116436695781989440891606237e-1,
    -1.52160949662516078556178806805e-1,
    2.01365400804030348374776537501e-1,
    4.47106157277725905176885569043e-2,
];

const BHH: [f64; 3] = [
    0.244094488188976377952755905512,
    0.733846688281611857341361741547,
    0.220588235294117647058823529412e-1,
];

const ER: [f64; 12] = [
    0.1312004499419488073250102996e-01,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753e+01,
    -0.4957589496572501915214079952,
    0.1664377182454986536961530415e+01,
    -0.3503288487499736816886487290,
    0.3341791187130174790297318841,
    0.8192320648511571246570742613e-01,
    -0.2235530786388629525884427845e-01,
];

const SAFETY: f64 = 0.9;
const MIN_SHRINK: f64 = 1.0 / 3.0;
const MAX_GROW: f64 = 6.0;
/// Steps below this (in the unit segment parameter) signal a singularity.
pub(crate) const MIN_STEP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Stats {
    pub steps: usize,
    pub rejected: usize,
    /// Sum of accepted local error estimates, in units of the scaled norm.
    pub local_error_sum: f64,
}

#[inline]
fn axpy(y: &State, h: f64, coeffs: &[f64], k: &[State; 12], upto: usize) -> State {
    let mut out = *y;
    for (j, &c) in coeffs.iter().enumerate().take(upto) {
        if c != 0.0 {
            let f = c * h;
            out[0] += k[j][0] * f;
            out[1] += k[j][1] * f;
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t = 0` to `t = 1` with mixed absolute and
/// relative local error control `tol·(1 + |y|)` per real component.
/// `budget` is the number of steps still allowed; `cap` is reported on overflow.
pub(crate) fn integrate_unit<F>(mut f: F, y0: State, tol: f64, budget: usize, cap: usize) -> Result<(State, Stats)>
where
    F: FnMut(f64, &State) -> State,
{
    let mut stats = Stats::default();
    let mut t = 0.0;
    let mut y = y0;
    let mut h = 0.05_f64;
    let mut k = [[C64::default(); 2]; 12];
    k[0] = f(t, &y);

    loop {
        if t >= 1.0 {
            return Ok((y, stats));
        }
        if stats.steps + stats.rejected >= budget {
            return Err(HeunError::StepLimitExceeded(cap));
        }
        let last = t + h >= 1.0;
        if last {
            h = 1.0 - t;
        }
        for i in 1..12 {
            let yi = axpy(&y, h, &A[i], &k, i);
            k[i] = f(t + C[i] * h, &yi);
        }
        let y_new = axpy(&y, h, &B, &k, 12);

        let mut err5 = 0.0;
        let mut err3 = 0.0;
        for comp in 0..2 {
            let mut e5 = C64::default();
            let mut bsum = C64::default();
            for j in 0..12 {
                e5 += k[j][comp] * ER[j];
                bsum += k[j][comp] * B[j];
            }
            let e3 = bsum - k[0][comp] * BHH[0] - k[8][comp] * BHH[1] - k[11][comp] * BHH[2];
            for (a, b, yo, yn) in [
                (e5.re, e3.re, y[comp].re, y_new[comp].re),
                (e5.im, e3.im, y[comp].im, y_new[comp].im),
            ] {
                let sk = tol * (1.0 + yo.abs().max(yn.abs()));
                err5 += (a / sk).powi(2);
                err3 += (b / sk).powi(2);
            }
        }
        let mut deno = err5 + 0.01 * err3;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err5 * (1.0 / (deno * 4.0)).sqrt();
        if !err.is_finite() {
            h *= MIN_SHRINK;
            stats.rejected += 1;
            if h < MIN_STEP {
                return Err(step_collapse());
            }
            continue;
        }

        let fac = (err.powf(1.0 / 8.0) / SAFETY).clamp(1.0 / MAX_GROW, 1.0 / MIN_SHRINK);
        let h_new = h / fac;
        if err <= 1.0 {
            stats.steps += 1;
            stats.local_error_sum += err;
            t = if last { 1.0 } else { t + h };
            y = y_new;
            k[0] = f(t, &y);
            h = h_new.min(1.0);
        } else {
            stats.rejected += 1;
            h /= (err.powf(1.0 / 8.0) / SAFETY).min(1.0 / MIN_SHRINK);
            if h < MIN_STEP {
                return Err(step_collapse());
            }
        }
    }
}

fn step_collapse() -> HeunError {
    HeunError::SingularityTooClose {
        point: "adaptive step collapse".into(),
        distance: 0.0,
        clearance: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_is_integrated_to_tolerance() {
        // y' = λ y with complex λ; exact e^{λ}
        let lam = C64::new(-0.7, 2.3);
        let (y, stats) = integrate_unit(|_, y| [y[0] * lam, y[1] * lam], [C64::new(1.0, 0.0); 2], 1e-12, 10_000, 10_000).unwrap();
        assert!((y[0] - lam.exp()).norm() < 1e-11, "{}", (y[0] - lam.exp()).norm());
        assert!(stats.steps > 1);
    }

    #[test]
    fn harmonic_oscillator_eighth_order_accuracy() {
        let w = 20.0;
        let f = |_t: f64, y: &State| [y[1], y[0] * (-w * w)];
        let (y, _) = integrate_unit(f, [C64::new(1.0, 0.0), C64::default()], 1e-13, 100_000, 100_000).unwrap();
        assert!((y[0].re - w.cos()).abs() < 1e-10);
    }

    #[test]
    fn step_budget_is_enforced() {
        let w = 2000.0;
        let f = |_t: f64, y: &State| [y[1], y[0] * (-w * w)];
        let r = integrate_unit(f, [C64::new(1.0, 0.0), C64::default()], 1e-13, 50, 50);
        assert_eq!(r.unwrap_err(), HeunError::StepLimitExceeded(50));
    }

    #[test]
    fn blow_up_collapses_step() {
        // y' = 1/(t - 0.5)^2 blows up inside the interval
        let f = |t: f64, _y: &State| [C64::new(1.0 / (t - 0.5).powi(2), 0.0), C64::default()];
        let r = integrate_unit(f, [C64::default(); 2], 1e-12, 1_000_000, 1_000_000);
        assert!(matches!(r, Err(HeunError::SingularityTooClose { .. }) | Err(HeunError::StepLimitExceeded(_))));
    }
}
