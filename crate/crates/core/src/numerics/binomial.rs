//! Binomial tail probabilities.
//!
//! The probability mass at the first term of the tail is evaluated with
//! Loader's saddle-point expansion (`stirlerr`, `bd0`), which keeps full
//! relative accuracy deep in the tails. The remaining terms follow by the
//! ratio recurrence, always walking away from the mode so that terms shrink,
//! and are summed relative to the first term with Neumaier compensation.
//! Tails that contain the mode are obtained as complements of the other side.

use std::f64::consts::PI;

use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailDirection {
    /// `P(X >= k)`
    AtLeast,
    /// `P(X <= k)`
    AtMost,
    /// `P(X > k)`
    GreaterThan,
}

/// A tail event of `X ~ b(trials, success_prob)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailQuery {
    pub trials: u64,
    pub success_prob: f64,
    pub cutoff: i64,
    pub direction: TailDirection,
}

impl TailQuery {
    pub fn new(trials: u64, success_prob: f64, cutoff: i64, direction: TailDirection) -> Self {
        TailQuery { trials, success_prob, cutoff, direction }
    }
}

// ln(n!) - (n + 1/2) ln n + n - ln sqrt(2 pi)
fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15 {
        let nf = n as f64;
        let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
        return ln_fact - (nf + 0.5) * nf.ln() + nf - 0.5 * (2.0 * PI).ln();
    }
    let nf = n as f64;
    let nn = nf * nf;
    if n > 500 {
        (S0 - S1 / nn) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
    }
}

// x ln(x / np) + np - x, computed without cancellation when x is close to np
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// `ln P(X = x)` for `X ~ b(n, p)`.
pub fn binom_log_pmf(x: u64, n: u64, p: f64) -> f64 {
    let q = 1.0 - p;
    if x > n {
        return f64::NEG_INFINITY;
    }
    if x == 0 {
        return n as f64 * (-p).ln_1p();
    }
    if x == n {
        return n as f64 * p.ln();
    }
    let (xf, nf) = (x as f64, n as f64);
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(xf, nf * p) - bd0(nf - xf, nf * q);
    let lf = (2.0 * PI).ln() + xf.ln() + (-xf / nf).ln_1p();
    lc - 0.5 * lf
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

fn mode(n: u64, p: f64) -> u64 {
    (((n + 1) as f64 * p).floor() as u64).min(n)
}

// P(X >= k) for k above the mode
fn upper_from(k: u64, n: u64, p: f64) -> f64 {
    let odds = p / (1.0 - p);
    let mut acc = Neumaier::default();
    let mut rel = 1.0;
    acc.add(rel);
    let mut j = k;
    while j < n {
        rel *= (n - j) as f64 / (j + 1) as f64 * odds;
        j += 1;
        acc.add(rel);
        if rel < acc.sum * 1e-17 {
            break;
        }
    }
    (binom_log_pmf(k, n, p) + acc.total().ln()).exp()
}

// P(X <= k) for k below the mode
fn lower_from(k: u64, n: u64, p: f64) -> f64 {
    let inv_odds = (1.0 - p) / p;
    let mut acc = Neumaier::default();
    let mut rel = 1.0;
    acc.add(rel);
    let mut j = k;
    while j > 0 {
        rel *= j as f64 / (n - j + 1) as f64 * inv_odds;
        j -= 1;
        acc.add(rel);
        if rel < acc.sum * 1e-17 {
            break;
        }
    }
    (binom_log_pmf(k, n, p) + acc.total().ln()).exp()
}

fn at_least(k: u64, n: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if k > mode(n, p) {
        upper_from(k, n, p)
    } else {
        1.0 - lower_from(k - 1, n, p)
    }
}

fn at_most(k: u64, n: u64, p: f64) -> f64 {
    if k >= n {
        return 1.0;
    }
    if k < mode(n, p) {
        lower_from(k, n, p)
    } else {
        1.0 - upper_from(k + 1, n, p)
    }
}

fn check_prob(p: f64) -> Result<(), NumericsError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(NumericsError::InvalidProbability(p))
    }
}

/// Exact tail probability. The cutoff must lie in `0..=trials`.
pub fn binom_tail(query: &TailQuery) -> Result<f64, NumericsError> {
    check_prob(query.success_prob)?;
    let n = query.trials;
    if query.cutoff < 0 || query.cutoff as u64 > n {
        return Err(NumericsError::CutoffOutOfRange { cutoff: query.cutoff, trials: n });
    }
    Ok(tail_in_range(query.cutoff as u64, n, query.success_prob, query.direction))
}

fn tail_in_range(k: u64, n: u64, p: f64, direction: TailDirection) -> f64 {
    let v = match direction {
        TailDirection::AtLeast => at_least(k, n, p),
        TailDirection::AtMost => at_most(k, n, p),
        TailDirection::GreaterThan => at_least(k + 1, n, p),
    };
    v.clamp(0.0, 1.0)
}

/// As [`binom_tail`], but cutoffs outside `0..=trials` give the trivial
/// probability of the (empty or certain) event instead of an error.
pub fn binom_tail_clamped(query: &TailQuery) -> Result<f64, NumericsError> {
    check_prob(query.success_prob)?;
    let n = query.trials as i64;
    let k = query.cutoff;
    if (0..=n).contains(&k) {
        return Ok(tail_in_range(k as u64, query.trials, query.success_prob, query.direction));
    }
    let below = k < 0;
    Ok(match query.direction {
        TailDirection::AtLeast | TailDirection::GreaterThan => {
            if below {
                1.0
            } else {
                0.0
            }
        }
        TailDirection::AtMost => {
            if below {
                0.0
            } else {
                1.0
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{ToPrimitive, Zero};
    use proptest::prelude::*;

    // P(X >= k) for p = a / den by exact integer enumeration. The scaled
    // terms C(n, j) a^j (den - a)^(n - j) are integers, so each follows from
    // the previous one by an exact division.
    fn exact_uppers(n: u64, a: u64, den: u64, ks: &[u64]) -> Vec<f64> {
        let b = den - a;
        let mut term = BigInt::from(b).pow(n as u32);
        // suffix sums are accumulated from the top down
        let mut terms = Vec::with_capacity(n as usize + 1);
        for j in 0..=n {
            terms.push(term.clone());
            if j < n {
                term = term * BigInt::from((n - j) * a) / BigInt::from((j + 1) * b);
            }
        }
        let scale = BigInt::from(den).pow(n as u32);
        let mut out = vec![0.0; ks.len()];
        let mut acc = BigInt::zero();
        for j in (0..=n).rev() {
            acc += &terms[j as usize];
            for (i, &k) in ks.iter().enumerate() {
                if k == j {
                    out[i] = BigRational::new(acc.clone(), scale.clone()).to_f64().unwrap();
                }
            }
        }
        out
    }

    fn exact_upper_over(n: u64, a: u64, den: u64, k: u64) -> f64 {
        exact_uppers(n, a, den, &[k])[0]
    }

    fn exact_upper(n: u64, a: u64, k: u64) -> f64 {
        exact_upper_over(n, a, 10, k)
    }

    fn q(n: u64, p: f64, k: i64, d: TailDirection) -> f64 {
        binom_tail(&TailQuery::new(n, p, k, d)).unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        if b == 0.0 {
            a.abs() < 1e-300
        } else {
            ((a - b) / b).abs() <= tol
        }
    }

    #[test]
    fn two_coins() {
        assert!((q(2, 0.5, 1, TailDirection::AtLeast) - 0.75).abs() < 1e-15);
        assert!((q(2, 0.5, 1, TailDirection::GreaterThan) - 0.25).abs() < 1e-15);
        assert!((q(2, 0.5, 1, TailDirection::AtMost) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn small_n_matches_rational_enumeration() {
        for n in 0..=20u64 {
            for a in 1..=9u64 {
                let p = a as f64 / 10.0;
                for k in 0..=n {
                    let want = exact_upper(n, a, k);
                    let got = q(n, p, k as i64, TailDirection::AtLeast);
                    assert!(rel_close(got, want, 1e-12), "n={n} p={p} k={k}: {got} vs {want}");
                    // P(X <= k) = P(n - X >= n - k) with n - X ~ b(n, 1 - p)
                    let want_le = exact_upper(n, 10 - a, n - k);
                    let got_le = q(n, p, k as i64, TailDirection::AtMost);
                    assert!(rel_close(got_le, want_le, 1e-12), "n={n} p={p} k={k} AtMost");
                }
            }
        }
    }

    #[test]
    fn moderate_n_far_tails() {
        for &(n, a, k) in &[(400u64, 3u64, 200u64), (1000, 5, 650), (2000, 1, 20), (2000, 7, 1900), (600, 2, 3)] {
            let want = exact_upper(n, a, k);
            let got = q(n, a as f64 / 10.0, k as i64, TailDirection::AtLeast);
            assert!(rel_close(got, want, 1e-10), "n={n} a={a} k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn point_masses() {
        let lp = binom_log_pmf(0, 10, 0.3);
        assert!((lp - 10.0 * 0.7f64.ln()).abs() < 1e-14);
        let lp = binom_log_pmf(5, 10, 0.5);
        assert!((lp.exp() - 252.0 / 1024.0).abs() < 1e-15);
        assert_eq!(binom_log_pmf(11, 10, 0.5), f64::NEG_INFINITY);
    }

    #[test]
    fn stirlerr_branches_agree() {
        // the log-factorial form is accurate enough at 16..20 to compare
        for n in 16..=20u64 {
            let nf = n as f64;
            let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
            let direct = ln_fact - (nf + 0.5) * nf.ln() + nf - 0.5 * (2.0 * PI).ln();
            assert!((stirlerr(n) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn large_n_matches_exact_enumeration() {
        let n = 20_000u64;
        let ks = [6_000u64, 7_300, 7_399, 7_400, 7_401, 7_480, 7_800, 9_000];
        let want = exact_uppers(n, 37, 100, &ks);
        for (&k, &want) in ks.iter().zip(&want) {
            let got = q(n, 0.37, k as i64, TailDirection::AtLeast);
            assert!(rel_close(got, want, 1e-10), "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn million_trials_complements() {
        let n = 1_000_000u64;
        for k in [350_000i64, 369_000, 370_000, 371_500, 372_400] {
            let up = q(n, 0.37, k, TailDirection::AtLeast);
            let lo = q(n, 0.37, k - 1, TailDirection::AtMost);
            assert!((up + lo - 1.0).abs() < 1e-12);
        }
        // the median of b(n, p) is np when np is an integer
        assert!(q(n, 0.5, 500_000, TailDirection::AtLeast) >= 0.5);
        assert!(q(n, 0.5, 500_000, TailDirection::AtMost) >= 0.5);
    }

    #[test]
    fn range_errors_and_clamping() {
        assert!(binom_tail(&TailQuery::new(5, 0.5, 6, TailDirection::AtLeast)).is_err());
        assert!(binom_tail(&TailQuery::new(5, 0.5, -1, TailDirection::AtMost)).is_err());
        assert!(binom_tail(&TailQuery::new(5, 1.0, 2, TailDirection::AtMost)).is_err());
        let c = |k, d| binom_tail_clamped(&TailQuery::new(5, 0.5, k, d)).unwrap();
        assert_eq!(c(-3, TailDirection::AtLeast), 1.0);
        assert_eq!(c(9, TailDirection::AtLeast), 0.0);
        assert_eq!(c(-1, TailDirection::AtMost), 0.0);
        assert_eq!(c(7, TailDirection::AtMost), 1.0);
        assert_eq!(c(-1, TailDirection::GreaterThan), 1.0);
        assert_eq!(q(5, 0.5, 5, TailDirection::GreaterThan), 0.0);
    }

    proptest! {
        #[test]
        fn reflection_symmetry(n in 1u64..3000, p in 0.01f64..0.99, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).round() as u64;
            let a = q(n, p, k as i64, TailDirection::AtLeast);
            let b = q(n, 1.0 - p, (n - k) as i64, TailDirection::AtMost);
            prop_assert!(rel_close(a, b, 1e-10) || (a - b).abs() < 1e-300);
        }

        #[test]
        fn monotone_in_cutoff(n in 1u64..500, p in 0.01f64..0.99) {
            let mut prev_ge = f64::INFINITY;
            let mut prev_le = -1.0;
            for k in 0..=n as i64 {
                let ge = q(n, p, k, TailDirection::AtLeast);
                let le = q(n, p, k, TailDirection::AtMost);
                prop_assert!(ge <= prev_ge);
                prop_assert!(le >= prev_le);
                let mass = binom_log_pmf(k as u64, n, p).exp();
                prop_assert!((ge + le - 1.0 - mass).abs() < 1e-12);
                prev_ge = ge;
                prev_le = le;
            }
        }
    }
}
