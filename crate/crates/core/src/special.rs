//! Special functions and cancellation-free brackets used by the rate formulas.

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this argument both brackets switch from the direct expression to
/// their Taylor series.
pub const SERIES_SWITCH: f64 = 0.5;

/// `1 - sin(x)/x`, accurate to ~1e-15 relative for all `x >= 0`.
pub fn sinc_deficit(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return 0.0;
    }
    if x >= SERIES_SWITCH {
        return 1.0 - x.sin() / x;
    }
    // x²/3! - x⁴/5! + x⁶/7! - ...
    let x2 = x * x;
    let mut term = x2 / 6.0;
    let mut sum = term;
    let mut n = 1;
    while term.abs() > 1e-18 * sum.abs() {
        let k = (2 * n + 2) as f64;
        term *= -x2 / (k * (k + 1.0));
        sum += term;
        n += 1;
    }
    sum
}

/// Taylor coefficients of the piezo bracket, x⁷ through x¹⁹ (odd powers).
/// The x, x³ and x⁵ terms cancel exactly.
const PIEZO_SERIES: [f64; 7] = [
    1.0 / 6.0,
    -11.0 / 1512.0,
    5.0 / 33264.0,
    -19.0 / 10_378_368.0,
    23.0 / 1_556_755_200.0,
    -1.0 / 11_762_150_400.0,
    31.0 / 84_475_764_172_800.0,
];

/// `x⁵ + 5x(2x² − 21)cos x + 15(7 − 3x²)sin x`.
///
/// Leading behaviour is `x⁷/6`; the direct form loses every digit below
/// `x ≈ 0.1`, so small arguments use the series.
pub fn piezo_bracket(x: f64) -> f64 {
    let x = x.abs();
    if x >= SERIES_SWITCH {
        return piezo_bracket_direct(x);
    }
    let x2 = x * x;
    let poly = PIEZO_SERIES.iter().rev().fold(0.0, |acc, &c| acc * x2 + c);
    x2 * x2 * x2 * x * poly
}

/// `piezo_bracket(x) / x⁵`; finite at the origin (tends to `x²/6`).
pub fn piezo_bracket_over_x5(x: f64) -> f64 {
    let x = x.abs();
    if x >= SERIES_SWITCH {
        return piezo_bracket_direct(x) / x.powi(5);
    }
    let x2 = x * x;
    let poly = PIEZO_SERIES.iter().rev().fold(0.0, |acc, &c| acc * x2 + c);
    x2 * poly
}

pub(crate) fn piezo_bracket_direct(x: f64) -> f64 {
    let x2 = x * x;
    x2 * x2 * x + 5.0 * x * (2.0 * x2 - 21.0) * x.cos() + 15.0 * (7.0 - 3.0 * x2) * x.sin()
}

/// Exponential integral `E1(z) = ∫_z^∞ e^{-t}/t dt` for `z > 0`.
///
/// Power series up to `z = 1`, modified-Lentz continued fraction above.
pub fn exp_integral_e1(z: f64) -> Result<f64> {
    if !z.is_finite() {
        if z == f64::INFINITY {
            return Ok(0.0);
        }
        return Err(Error::NonFinite("E1 argument".into()));
    }
    if z <= 0.0 {
        return Err(Error::invalid(
            "E1 argument",
            format!("must be > 0, got {z}"),
        ));
    }
    Ok(if z <= 1.0 {
        e1_series(z)
    } else {
        e1_continued_fraction(z)
    })
}

fn e1_series(z: f64) -> f64 {
    // E1(z) = -γ - ln z - Σ_{n≥1} (-z)^n / (n·n!)
    let mut sum = 0.0;
    let mut power = 1.0;
    for n in 1..100 {
        let nf = n as f64;
        power *= -z / nf;
        let term = power / nf;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

fn e1_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}
