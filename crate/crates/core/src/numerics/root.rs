use super::NumericsError;

pub const MAX_BISECTION_ITERATIONS: usize = 200;

/// Bisection on a sign-changing bracket. Stops when the bracket is no wider
/// than `tol` or an exact zero is hit, and returns the bracket midpoint.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(NumericsError::BadTolerance);
    }
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if !flo.is_finite() {
        return Err(NumericsError::NonFinite(lo));
    }
    if !fhi.is_finite() {
        return Err(NumericsError::NonFinite(hi));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(NumericsError::NoSignChange { lo, hi, flo, fhi });
    }
    for _ in 0..MAX_BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(NumericsError::NonFinite(mid));
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_a_third() {
        let r = bisect(|x| x - 1.0 / 3.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_same_sign() {
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-9), Err(NumericsError::NoSignChange { .. })));
    }

    #[test]
    fn rejects_nan() {
        assert!(matches!(bisect(|x| if x > 0.7 { f64::NAN } else { x - 0.5 }, 0.0, 1.0, 1e-9),
                         Err(NumericsError::NonFinite(_))));
        assert!(matches!(bisect(|x| (x - 0.5).ln(), 0.0, 1.0, 1e-9), Err(NumericsError::NonFinite(_))));
    }

    #[test]
    fn reversed_bracket_and_tiny_tolerance() {
        let r = bisect(|x| x.cos(), 2.0, 1.0, 1e-300).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(bisect(|x| x, -1.0, 1.0, 0.0).is_err());
    }
}
