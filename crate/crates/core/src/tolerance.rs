//! Exact tolerances and scenarios.
//!
//! Every happiness decision in the model is a comparison of an integer count
//! against `tau * (2w + 1)`. Tolerances are therefore kept as reduced
//! fractions so those comparisons can be carried out in integers.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use thiserror::Error;

/// Largest accepted tolerance denominator.
pub const MAX_DENOMINATOR: u64 = 1_000_000_000;

/// Maximum number of fractional digits accepted by [`parse_tolerance`].
pub const MAX_FRACTION_DIGITS: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToleranceError {
    #[error("tolerance {0} is outside the open interval (0, 1)")]
    OutOfRange(String),
    #[error("tolerance {0:?} has more than {MAX_FRACTION_DIGITS} fractional digits")]
    TooManyDigits(String),
    #[error("malformed tolerance {0:?}")]
    Malformed(String),
    #[error("tolerance denominator {0} exceeds {MAX_DENOMINATOR}")]
    DenominatorTooLarge(u64),
    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),
}

/// A tolerance `numerator / denominator` strictly inside `(0, 1)`, always
/// stored in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tolerance {
    num: u64,
    den: u64,
}

impl Tolerance {
    pub fn new(num: u64, den: u64) -> Result<Self, ToleranceError> {
        if den == 0 || num == 0 || num >= den {
            return Err(ToleranceError::OutOfRange(format!("{num}/{den}")));
        }
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        if den > MAX_DENOMINATOR {
            return Err(ToleranceError::DenominatorTooLarge(den));
        }
        Ok(Tolerance { num, den })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new_raw(self.num, self.den)
    }

    /// `1 - tau`.
    pub fn complement(&self) -> Tolerance {
        Tolerance { num: self.den - self.num, den: self.den }
    }

    /// Whether `count` meets the tolerance in a window of `size` nodes, i.e.
    /// `den * count >= num * size`.
    pub fn is_met(&self, count: u64, size: u64) -> bool {
        self.den as u128 * count as u128 >= self.num as u128 * size as u128
    }

    /// Smallest count meeting the tolerance in a window of `size` nodes:
    /// `ceil(num * size / den)`.
    pub fn min_count(&self, size: u64) -> u64 {
        let p = self.num as u128 * size as u128;
        let d = self.den as u128;
        p.div_ceil(d) as u64
    }

    /// `floor(tau * size)`.
    pub fn floor_times(&self, size: u64) -> u64 {
        (self.num as u128 * size as u128 / self.den as u128) as u64
    }

    /// Whether `self + other <= 1`.
    pub fn sum_at_most_one(&self, other: &Tolerance) -> bool {
        let lhs = self.num as u128 * other.den as u128 + other.num as u128 * self.den as u128;
        lhs <= self.den as u128 * other.den as u128
    }

    /// Whether `self + other == 1`.
    pub fn sum_is_one(&self, other: &Tolerance) -> bool {
        let lhs = self.num as u128 * other.den as u128 + other.num as u128 * self.den as u128;
        lhs == self.den as u128 * other.den as u128
    }

    /// Compares against `1/2` exactly.
    pub fn cmp_half(&self) -> std::cmp::Ordering {
        (2 * self.num).cmp(&self.den)
    }
}

impl PartialOrd for Tolerance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tolerance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

/// Parses a decimal such as `"0.38"` (or a fraction such as `"3/5"`) into an
/// exact tolerance.
pub fn parse_tolerance(text: &str) -> Result<Tolerance, ToleranceError> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let num: u64 = a.trim().parse().map_err(|_| ToleranceError::Malformed(t.into()))?;
        let den: u64 = b.trim().parse().map_err(|_| ToleranceError::Malformed(t.into()))?;
        return Tolerance::new(num, den);
    }
    let (int_part, frac_part) = match t.split_once('.') {
        Some((i, f)) => (i, f),
        None => (t, ""),
    };
    let digits_ok = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(ToleranceError::Malformed(t.into()));
    }
    if frac_part.len() > MAX_FRACTION_DIGITS {
        return Err(ToleranceError::TooManyDigits(t.into()));
    }
    let int_value: u64 = if int_part.is_empty() {
        0
    } else {
        // anything with a non-zero integer part is >= 1
        match int_part.trim_start_matches('0') {
            "" => 0,
            _ => return Err(ToleranceError::OutOfRange(t.into())),
        }
    };
    let den = 10u64.pow(frac_part.len() as u32);
    let num = if frac_part.is_empty() { 0 } else { frac_part.parse::<u64>().unwrap() };
    let num = int_value * den + num;
    if num == 0 {
        return Err(ToleranceError::OutOfRange(t.into()));
    }
    Tolerance::new(num, den)
}

impl FromStr for Tolerance {
    type Err = ToleranceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tolerance(s)
    }
}

/// Canonical text: a terminating decimal without trailing zeros when the
/// denominator divides `10^9`, `num/den` otherwise.
impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = 10u64.pow(MAX_FRACTION_DIGITS as u32);
        if scale % self.den == 0 {
            let digits = format!("{:09}", self.num * (scale / self.den));
            write!(f, "0.{}", digits.trim_end_matches('0'))
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// The signature triple `(rho, tau_g, tau_r)`: initial green density and the
/// tolerances of green and red nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    rho: f64,
    tau_g: Tolerance,
    tau_r: Tolerance,
}

impl Scenario {
    pub fn new(rho: f64, tau_g: Tolerance, tau_r: Tolerance) -> Result<Self, ToleranceError> {
        check_probability(rho)?;
        Ok(Scenario { rho, tau_g, tau_r })
    }

    /// Convenience constructor from decimal strings.
    pub fn parse(rho: f64, tau_g: &str, tau_r: &str) -> Result<Self, ToleranceError> {
        Scenario::new(rho, parse_tolerance(tau_g)?, parse_tolerance(tau_r)?)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn tau_g(&self) -> Tolerance {
        self.tau_g
    }

    pub fn tau_r(&self) -> Tolerance {
        self.tau_r
    }

    /// The colour-swapped scenario `(1 - rho, tau_r, tau_g)`.
    pub fn swapped(&self) -> Scenario {
        Scenario { rho: 1.0 - self.rho, tau_g: self.tau_r, tau_r: self.tau_g }
    }
}

pub(crate) fn check_probability(p: f64) -> Result<f64, ToleranceError> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(ToleranceError::ProbabilityOutOfRange(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_tolerance("0.5").unwrap(), Tolerance::new(1, 2).unwrap());
        let t = parse_tolerance("0.38").unwrap();
        assert_eq!((t.numerator(), t.denominator()), (19, 50));
        assert_eq!(parse_tolerance(".25").unwrap(), Tolerance::new(1, 4).unwrap());
        assert_eq!(parse_tolerance("3/5").unwrap(), Tolerance::new(6, 10).unwrap());
        assert_eq!(parse_tolerance("0.000000001").unwrap().denominator(), 1_000_000_000);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_tolerance("1.0"), Err(ToleranceError::OutOfRange(_))));
        assert!(matches!(parse_tolerance("0"), Err(ToleranceError::OutOfRange(_))));
        assert!(matches!(parse_tolerance("0.000"), Err(ToleranceError::OutOfRange(_))));
        assert!(matches!(parse_tolerance("2.5"), Err(ToleranceError::OutOfRange(_))));
        assert!(matches!(parse_tolerance("0.1234567891"), Err(ToleranceError::TooManyDigits(_))));
        assert!(matches!(parse_tolerance("0.3a"), Err(ToleranceError::Malformed(_))));
        assert!(matches!(parse_tolerance("-0.3"), Err(ToleranceError::Malformed(_))));
        assert!(matches!(parse_tolerance(""), Err(ToleranceError::Malformed(_))));
        assert!(matches!(parse_tolerance("."), Err(ToleranceError::Malformed(_))));
        assert!(Tolerance::new(1, 2_000_000_001).is_err());
    }

    #[test]
    fn min_count_matches_cross_multiplication() {
        for den in 1..40u64 {
            for num in 1..den {
                let t = Tolerance::new(num, den).unwrap();
                for size in 1..30u64 {
                    let need = t.min_count(size);
                    assert!(t.is_met(need, size));
                    if need > 0 {
                        assert!(!t.is_met(need - 1, size));
                    }
                }
            }
        }
    }

    #[test]
    fn exact_comparisons() {
        let a = parse_tolerance("0.4").unwrap();
        let b = parse_tolerance("0.6").unwrap();
        assert!(a.sum_is_one(&b) && a.sum_at_most_one(&b));
        assert!(!b.sum_at_most_one(&parse_tolerance("0.41").unwrap()));
        assert_eq!(parse_tolerance("0.5").unwrap().cmp_half(), std::cmp::Ordering::Equal);
        assert!(a < b);
        assert_eq!(a.complement(), b);
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(parse_tolerance("0.500").unwrap().to_string(), "0.5");
        assert_eq!(Tolerance::new(1, 3).unwrap().to_string(), "1/3");
        assert_eq!(Tolerance::new(13, 20).unwrap().to_string(), "0.65");
    }

    #[test]
    fn scenario_rejects_degenerate_rho() {
        let t = parse_tolerance("0.5").unwrap();
        assert!(Scenario::new(0.0, t, t).is_err());
        assert!(Scenario::new(1.0, t, t).is_err());
        assert!(Scenario::new(f64::NAN, t, t).is_err());
    }

    proptest! {
        #[test]
        fn parse_format_roundtrip(digits in 1usize..=9, value in 1u64..1_000_000_000) {
            let v = value % 10u64.pow(digits as u32);
            prop_assume!(v != 0 && v % 10 != 0);
            let text = format!("0.{:0width$}", v, width = digits);
            let t = parse_tolerance(&text).unwrap();
            prop_assert_eq!(t.to_string(), text);
        }
    }
}
