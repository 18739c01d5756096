//! The harmony index: a potential that rises with every selective flip.
//!
//! For a weight `chi > 0` put `A(x) = chi` on green nodes and `A(x) = 1` on
//! red ones, and let `L(x)` be the fraction of `N(x)` sharing the colour of
//! `x`. The index is `S = sum_x A(x) L(x)`. When `x` changes colour,
//! `S' - S = 2 A'(x) - 2 (1 + chi) L(x) + (1 + chi) / (2w + 1)`, with `A'` the
//! weight of its new colour, and a suitable `chi` makes this positive for
//! every hopeful `x`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ring::{Color, Ring};
use crate::tolerance::Scenario;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarmonyError {
    #[error("no admissible weight: the interval ({lo}, {hi}) is empty for w = {w}")]
    Unavailable { lo: BigRational, hi: BigRational, w: usize },
    #[error("harmony index did not increase when node {node} flipped at step {step} (change {delta})")]
    NotIncreasing { node: usize, step: u64, delta: BigRational },
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

/// Midpoint of the admissible interval for `chi`.
///
/// With `tau_g + tau_r <= 1` the interval is
/// `[tau_r / (1 - tau_r), (1 - tau_g) / tau_g]`. Otherwise, with
/// `e = 1 / (2w + 1)`, it is the open interval
/// `((1 - tau_g + e) / (tau_g - e), (tau_r - e) / (1 - tau_r + e))`, which is
/// empty for small `w`.
pub fn harmony_chi(scenario: &Scenario, w: usize) -> Result<BigRational, HarmonyError> {
    let (g, r) = (scenario.tau_g(), scenario.tau_r());
    let (gn, gd) = (big(g.numerator()), big(g.denominator()));
    let (rn, rd) = (big(r.numerator()), big(r.denominator()));
    let two = BigRational::from_integer(big(2));
    if g.sum_at_most_one(&r) {
        let lo = BigRational::new(rn.clone(), &rd - &rn);
        let hi = BigRational::new(&gd - &gn, gn);
        return Ok((lo + hi) / two);
    }
    let window = big(2 * w as u64 + 1);
    // numerators and denominators scaled by den * (2w + 1)
    let g_minus_e = &gn * &window - &gd;
    let r_minus_e = &rn * &window - &rd;
    let lo_num = (&gd - &gn) * &window + &gd;
    let hi_den = (&rd - &rn) * &window + &rd;
    if !g_minus_e.is_positive() || !r_minus_e.is_positive() {
        let lo = if g_minus_e.is_positive() {
            BigRational::new(lo_num, g_minus_e)
        } else {
            BigRational::zero()
        };
        let hi = if r_minus_e.is_positive() {
            BigRational::new(r_minus_e, hi_den)
        } else {
            BigRational::zero()
        };
        return Err(HarmonyError::Unavailable { lo, hi, w });
    }
    let lo = BigRational::new(lo_num, g_minus_e);
    let hi = BigRational::new(r_minus_e, hi_den);
    if lo >= hi {
        return Err(HarmonyError::Unavailable { lo, hi, w });
    }
    Ok((lo + hi) / two)
}

/// `S = sum_x A(x) L(x)` evaluated from scratch.
pub fn harmony_index(ring: &Ring, chi: &BigRational) -> BigRational {
    let window = ring.window() as u64;
    let (mut same_green, mut same_red) = (0u64, 0u64);
    for x in 0..ring.n() {
        let g = ring.green_count(x) as u64;
        match ring.color(x) {
            Color::Green => same_green += g,
            Color::Red => same_red += window - g,
        }
    }
    (chi * BigRational::from_integer(big(same_green)) + BigRational::from_integer(big(same_red)))
        / BigRational::from_integer(big(window))
}

/// Tracks `S` exactly along a run and checks every flip increases it.
///
/// The index is held as the integer `S * q * (2w + 1)` where `chi = p / q`.
#[derive(Debug, Clone)]
pub struct HarmonyMonitor {
    chi: BigRational,
    p: BigInt,
    q: BigInt,
    window: u64,
    scaled: BigInt,
    flips: u64,
}

impl HarmonyMonitor {
    pub fn new(ring: &Ring) -> Result<HarmonyMonitor, HarmonyError> {
        let chi = harmony_chi(ring.scenario(), ring.w())?;
        Ok(HarmonyMonitor::with_chi(ring, chi))
    }

    pub fn with_chi(ring: &Ring, chi: BigRational) -> HarmonyMonitor {
        let window = ring.window() as u64;
        let s = harmony_index(ring, &chi);
        let scale = BigRational::from_integer(chi.denom() * big(window));
        let scaled = (s * scale).to_integer();
        HarmonyMonitor { p: chi.numer().clone(), q: chi.denom().clone(), chi, window, scaled, flips: 0 }
    }

    pub fn chi(&self) -> &BigRational {
        &self.chi
    }

    /// The current value of `S`.
    pub fn current_index(&self) -> BigRational {
        BigRational::new(self.scaled.clone(), &self.q * big(self.window))
    }

    /// `n * max(1, chi)`, an upper bound for `S`.
    pub fn upper_bound(&self, n: usize) -> BigRational {
        let one = BigRational::one();
        let m = if self.chi > one { self.chi.clone() } else { one };
        m * BigRational::from_integer(big(n as u64))
    }

    pub fn flips_checked(&self) -> u64 {
        self.flips
    }

    /// Records the flip of `x`, which must not yet have been applied to
    /// `ring`. Fails if the index would not strictly increase.
    pub fn record_flip(&mut self, ring: &Ring, x: usize, step: u64) -> Result<(), HarmonyError> {
        let g = ring.green_count(x) as u64;
        let (same, new_weight) = match ring.color(x) {
            Color::Green => (g, &self.q),
            Color::Red => (self.window - g, &self.p),
        };
        let p_plus_q = &self.p + &self.q;
        let delta = big(2) * new_weight * big(self.window) - big(2) * &p_plus_q * big(same) + &p_plus_q;
        self.flips += 1;
        if !delta.is_positive() {
            return Err(HarmonyError::NotIncreasing {
                node: x,
                step,
                delta: BigRational::new(delta, &self.q * big(self.window)),
            });
        }
        self.scaled += delta;
        Ok(())
    }
}
