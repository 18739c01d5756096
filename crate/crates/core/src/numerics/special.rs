//! The threshold functions `f`, `g`, `h` and the polynomial `Z`, all in log
//! space with `0 ln 0 = 0`.

use super::NumericsError;

/// Distance from the line `x + y = 1` within which [`eval_h_flagged`] reports
/// its value as a boundary extension.
pub const LINE_BAND: f64 = 1e-6;

// Below this distance the divided difference is replaced by its midpoint
// expansion, which is exact on the line itself.
const SERIES_BAND: f64 = 1e-5;

#[inline]
fn xlnx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

// t ln t + (1 - t) ln(1 - t); symmetric about 1/2.
#[inline]
fn phi(t: f64) -> f64 {
    xlnx(t) + xlnx(1.0 - t)
}

/// `ln f(s)` for `s` in `[0, 1/2]`, NaN outside.
pub fn ln_f(s: f64) -> f64 {
    if !(0.0..=0.5).contains(&s) {
        return f64::NAN;
    }
    wln(1.0 - 2.0 * s, 0.5 - s) - 2.0 * (1.0 - s) * (1.0 - s).ln()
}

/// `ln g(x)` for `x` in `[1/2, 1)`, NaN outside.
pub fn ln_g(x: f64) -> f64 {
    if !(0.5..1.0).contains(&x) {
        return f64::NAN;
    }
    wln(2.0 * x - 1.0, x - 0.5) - 2.0 * x * x.ln()
}

// weight * ln(base), zero when the weight vanishes
#[inline]
fn wln(weight: f64, base: f64) -> f64 {
    if weight == 0.0 {
        0.0
    } else {
        weight * base.ln()
    }
}

/// `f(s) = (1/2 - s)^(1 - 2s) / (1 - s)^(2(1 - s))` on `(0, 1/2]`.
pub fn eval_f(s: f64) -> Result<f64, NumericsError> {
    if !(s > 0.0 && s <= 0.5) {
        return Err(NumericsError::Domain { function: "f", value: s });
    }
    Ok(ln_f(s).exp())
}

/// `g(x) = (x - 1/2)^(2x - 1) / x^(2x)` on `[1/2, 1)`.
pub fn eval_g(x: f64) -> Result<f64, NumericsError> {
    if !(0.5..1.0).contains(&x) {
        return Err(NumericsError::Domain { function: "g", value: x });
    }
    Ok(ln_g(x).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HValue {
    pub ln: f64,
    /// Set when `|1 - x - y| < LINE_BAND`, where the value is the continuous
    /// extension `(1 - x) / x` rather than the defining formula.
    pub boundary_extended: bool,
}

impl HValue {
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }
}

/// `ln h(x, y)` together with the boundary flag.
///
/// `ln h(x, y) = (phi(x) - phi(y)) / (1 - x - y)` with
/// `phi(t) = t ln t + (1 - t) ln(1 - t)`. Since `phi(y) = phi(1 - y)` this is
/// minus the divided difference of `phi` over `[x, 1 - y]`, which near the
/// line is expanded about the midpoint `m`:
/// `phi'(m) + phi'''(m) d^2 / 24`.
pub fn ln_h(x: f64, y: f64) -> HValue {
    let d = 1.0 - (x + y);
    let ln = if d.abs() < SERIES_BAND {
        let m = 0.5 * (1.0 + x - y);
        let phi3 = -1.0 / (m * m) + 1.0 / ((1.0 - m) * (1.0 - m));
        ((1.0 - x + y) / (1.0 + x - y)).ln() - phi3 * d * d / 24.0
    } else {
        (phi(x) - phi(y)) / d
    };
    HValue { ln, boundary_extended: d.abs() < LINE_BAND }
}

fn check_unit(function: &'static str, v: f64) -> Result<(), NumericsError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(NumericsError::Domain { function, value: v })
    }
}

/// `h(x, y)` on `(0, 1)^2`, extended continuously across `x + y = 1`.
pub fn eval_h(x: f64, y: f64) -> Result<f64, NumericsError> {
    Ok(eval_h_flagged(x, y)?.value())
}

pub fn eval_h_flagged(x: f64, y: f64) -> Result<HValue, NumericsError> {
    check_unit("h", x)?;
    check_unit("h", y)?;
    Ok(ln_h(x, y))
}

/// `Z(theta, rho) = 1 + theta^3 - 3 theta^2 + 3 theta^2 rho - 2 theta^3 rho`.
pub fn eval_z(theta: f64, rho: f64) -> f64 {
    let t2 = theta * theta;
    1.0 + t2 * theta - 3.0 * t2 + 3.0 * t2 * rho - 2.0 * t2 * theta * rho
}
