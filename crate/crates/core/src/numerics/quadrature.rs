//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Maximum number of panels before giving up with [`Error::NonConvergence`].
pub const SUBDIVISION_LIMIT: usize = 2000;

// Kronrod abscissae on [-1, 1], non-negative half; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * libm::fmin(1.0, libm::pow(200.0 * error / res_asc, 1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = libm::fmax(50.0 * f64::EPSILON * res_abs, error);
    }
    Panel { a, b, value, error }
}

/// `∫_a^b f(x) dx` to relative accuracy `rel_tol`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    integrate_adaptive_with_breaks(f, &[a, b], rel_tol)
}

/// Like [`integrate_adaptive`] over `[points[0], points[last]]`, with the
/// interior points seeded as panel boundaries (kinks, endpoint singularities).
pub fn integrate_adaptive_with_breaks<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], rel_tol: f64) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("need at least two integration limits"));
    }
    if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("integration limits must be finite and increasing"));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidArgument("rel_tol must be positive"));
    }
    let (lo, hi) = (points[0], points[points.len() - 1]);
    let mut panels: Vec<Panel> = points.windows(2).map(|w| kronrod15(&mut f, w[0], w[1])).collect();

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonConvergence { a: lo, b: hi, rel_tol, limit: SUBDIVISION_LIMIT });
        }
        if error <= rel_tol * value.abs() || error == 0.0 {
            return Ok(value);
        }
        if panels.len() >= SUBDIVISION_LIMIT {
            return Err(Error::NonConvergence { a: lo, b: hi, rel_tol, limit: SUBDIVISION_LIMIT });
        }
        let (worst, _) =
            panels.iter().enumerate().fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if !(a < mid && mid < b) {
            // Panel cannot be split further in floating point.
            return Err(Error::NonConvergence { a: lo, b: hi, rel_tol, limit: SUBDIVISION_LIMIT });
        }
        panels[worst] = kronrod15(&mut f, a, mid);
        panels.push(kronrod15(&mut f, mid, b));
    }
}
