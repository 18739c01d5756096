//! Tipping-point thresholds, domination and outcome prediction.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::dynamics::Dynamic;
use crate::numerics::{bisect, eval_z, ln_f, ln_g, ln_h, NumericsError};
use crate::ring::Color;
use crate::tolerance::{check_probability, Scenario, Tolerance, ToleranceError};

/// Width of the band around a threshold inside which comparisons are not
/// trusted.
pub const THRESHOLD_BAND: f64 = 1e-6;
/// Relative band for the domination comparison.
pub const DOMINATION_BAND: f64 = 1e-9;
/// Bracket width used for threshold roots.
pub const ROOT_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThresholdError {
    #[error(transparent)]
    Rho(#[from] ToleranceError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

// Root of ln_fn(s) = target on [lo, hi], retrying on a wider bracket.
fn solve(ln_fn: fn(f64) -> f64, target: f64, brackets: &[(f64, f64)]) -> Result<f64, NumericsError> {
    let mut last = None;
    for &(lo, hi) in brackets {
        match bisect(|s| ln_fn(s) - target, lo, hi, ROOT_TOLERANCE) {
            Ok(r) => return Ok(r),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one bracket"))
}

/// Root of `f(s) = 1 / (2 (1 - rho))`, or `1/2` when `rho >= 3/4`.
pub fn kappa_g(rho: f64) -> Result<f64, ThresholdError> {
    check_probability(rho)?;
    if rho >= 0.75 {
        return Ok(0.5);
    }
    let target = -(2.0 * (1.0 - rho)).ln();
    Ok(solve(ln_f, target, &[(0.5 * rho, rho.min(0.5)), (0.0, 0.5)])?)
}

/// Root of `f(s) = 1 / (2 rho)`, or `1/2` when `rho <= 1/4`.
pub fn kappa_r(rho: f64) -> Result<f64, ThresholdError> {
    check_probability(rho)?;
    if rho <= 0.25 {
        return Ok(0.5);
    }
    let target = -(2.0 * rho).ln();
    let sigma = 1.0 - rho;
    Ok(solve(ln_f, target, &[(0.5 * sigma, sigma.min(0.5)), (0.0, 0.5)])?)
}

/// `(mu_g, mu_r)`: the roots of `g(x) = 1 / (2 rho)` and
/// `g(x) = 1 / (2 (1 - rho))` on `[1/2, 1)`, each `1/2` when its target is at
/// least 2.
pub fn mu_thresholds(rho: f64) -> Result<(f64, f64), ThresholdError> {
    check_probability(rho)?;
    let top = 1.0 - f64::EPSILON;
    let mu_g = if rho <= 0.25 {
        0.5
    } else {
        solve(ln_g, -(2.0 * rho).ln(), &[(0.5, 0.5 * (1.0 + rho)), (0.5, top)])?
    };
    let mu_r = if rho >= 0.75 {
        0.5
    } else {
        solve(ln_g, -(2.0 * (1.0 - rho)).ln(), &[(0.5, 0.5 * (2.0 - rho)), (0.5, top)])?
    };
    Ok((mu_g, mu_r))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSet {
    pub rho: f64,
    pub kappa_g: f64,
    pub kappa_r: f64,
    pub mu_g: f64,
    pub mu_r: f64,
}

impl ThresholdSet {
    pub fn new(rho: f64) -> Result<ThresholdSet, ThresholdError> {
        let (mu_g, mu_r) = mu_thresholds(rho)?;
        Ok(ThresholdSet { rho, kappa_g: kappa_g(rho)?, kappa_r: kappa_r(rho)?, mu_g, mu_r })
    }

    /// The same thresholds seen with the colours exchanged.
    pub fn swapped(&self) -> ThresholdSet {
        ThresholdSet {
            rho: 1.0 - self.rho,
            kappa_g: self.kappa_r,
            kappa_r: self.kappa_g,
            mu_g: self.mu_r,
            mu_r: self.mu_g,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domination {
    RedDominating,
    GreenDominating,
    Boundary,
}

impl Domination {
    pub fn swapped(self) -> Domination {
        match self {
            Domination::RedDominating => Domination::GreenDominating,
            Domination::GreenDominating => Domination::RedDominating,
            Domination::Boundary => Domination::Boundary,
        }
    }
}

impl fmt::Display for Domination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domination::RedDominating => "red-dominating",
            Domination::GreenDominating => "green-dominating",
            Domination::Boundary => "boundary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationReport {
    pub label: Domination,
    /// `ln h(tau_g, tau_r)`.
    pub ln_h: f64,
    /// `ln((1 - rho) / rho)`.
    pub ln_target: f64,
    /// Set on (or within 1e-6 of) the line `tau_g + tau_r = 1`, where `h` is
    /// replaced by its continuous extension `(1 - tau_g) / tau_g`.
    pub boundary_extended: bool,
}

/// Red dominating iff `h(tau_g, tau_r) < (1 - rho) / rho`.
pub fn domination(rho: f64, tau_g: f64, tau_r: f64) -> DominationReport {
    let h = ln_h(tau_g, tau_r);
    let ln_target = (-rho).ln_1p() - rho.ln();
    let diff = h.ln - ln_target;
    let label = if diff.abs() <= DOMINATION_BAND {
        Domination::Boundary
    } else if diff < 0.0 {
        Domination::RedDominating
    } else {
        Domination::GreenDominating
    };
    DominationReport { label, ln_h: h.ln, ln_target, boundary_extended: h.boundary_extended }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaReport {
    pub lambda: f64,
    pub kappa_g: f64,
    pub kappa_r: f64,
    /// `ln h(kappa_g, 1/2) - ln((1 - lambda) / lambda)`; zero up to solver
    /// tolerance.
    pub residual: f64,
    /// `ln h(1/2, kappa_r) - ln((1 - lambda) / lambda)` at the same root.
    pub dual_residual: f64,
}

/// The density at which `(tau_g, tau_r) = (kappa_g, 1/2)` lies on the
/// domination boundary.
pub fn lambda() -> Result<LambdaReport, ThresholdError> {
    let target = |rho: f64| (-rho).ln_1p() - rho.ln();
    let gap = |rho: f64| match kappa_g(rho) {
        Ok(k) => ln_h(k, 0.5).ln - target(rho),
        Err(_) => f64::NAN,
    };
    let lambda = bisect(gap, 0.25, 0.5, ROOT_TOLERANCE)?;
    let kg = kappa_g(lambda)?;
    let kr = kappa_r(lambda)?;
    Ok(LambdaReport {
        lambda,
        kappa_g: kg,
        kappa_r: kr,
        residual: ln_h(kg, 0.5).ln - target(lambda),
        dual_residual: ln_h(0.5, kr).ln - target(lambda),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prediction {
    StaticAE,
    GreenTakeoverAE,
    RedTakeoverAE,
    GreenTotal,
    RedTotal,
    OpenQ1,
    OpenQ2,
    ThresholdCase,
    ConjecturedGreenTotal,
    ConjecturedRedTotal,
    ConjecturedCoinFlip,
}

impl Prediction {
    pub const ALL: [Prediction; 11] = [
        Prediction::StaticAE,
        Prediction::GreenTakeoverAE,
        Prediction::RedTakeoverAE,
        Prediction::GreenTotal,
        Prediction::RedTotal,
        Prediction::OpenQ1,
        Prediction::OpenQ2,
        Prediction::ThresholdCase,
        Prediction::ConjecturedGreenTotal,
        Prediction::ConjecturedRedTotal,
        Prediction::ConjecturedCoinFlip,
    ];

    /// The prediction with the roles of the colours exchanged.
    pub fn swapped(self) -> Prediction {
        use Prediction::*;
        match self {
            GreenTakeoverAE => RedTakeoverAE,
            RedTakeoverAE => GreenTakeoverAE,
            GreenTotal => RedTotal,
            RedTotal => GreenTotal,
            ConjecturedGreenTotal => ConjecturedRedTotal,
            ConjecturedRedTotal => ConjecturedGreenTotal,
            other => other,
        }
    }

    /// Whether the label is a proven outcome rather than open, borderline or
    /// conjectural.
    pub fn is_decided(self) -> bool {
        use Prediction::*;
        matches!(self, StaticAE | GreenTakeoverAE | RedTakeoverAE | GreenTotal | RedTotal)
    }

    pub fn name(self) -> &'static str {
        use Prediction::*;
        match self {
            StaticAE => "static-ae",
            GreenTakeoverAE => "green-takeover-ae",
            RedTakeoverAE => "red-takeover-ae",
            GreenTotal => "green-total",
            RedTotal => "red-total",
            OpenQ1 => "open-q1",
            OpenQ2 => "open-q2",
            ThresholdCase => "threshold-case",
            ConjecturedGreenTotal => "conjectured-green-total",
            ConjecturedRedTotal => "conjectured-red-total",
            ConjecturedCoinFlip => "conjectured-coin-flip",
        }
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Prediction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Prediction::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| format!("unknown prediction {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub prediction: Prediction,
    /// The rule the label derives from, in words.
    pub rule: String,
    pub thresholds: ThresholdSet,
    pub domination: DominationReport,
    /// For open labels: the limit of `Z(theta*, rho)` that drives firewall
    /// sparking. Negative means the sparking argument fails even in the
    /// limit.
    pub firewall_drift: Option<f64>,
}

/// One colour-role view of a scenario: either as given or with green and
/// red exchanged.
#[derive(Debug, Clone, Copy)]
struct View {
    rho: f64,
    tau_g: Tolerance,
    tau_r: Tolerance,
    th: ThresholdSet,
    dom: Domination,
    swapped: bool,
}

impl View {
    fn swap(&self) -> View {
        View {
            rho: 1.0 - self.rho,
            tau_g: self.tau_r,
            tau_r: self.tau_g,
            th: self.th.swapped(),
            dom: self.dom.swapped(),
            swapped: !self.swapped,
        }
    }

    fn g(&self) -> f64 {
        self.tau_g.to_f64()
    }

    fn r(&self) -> f64 {
        self.tau_r.to_f64()
    }
}

struct Verdict {
    prediction: Prediction,
    rule: String,
    drift: Option<f64>,
}

fn verdict(prediction: Prediction, rule: &str) -> Verdict {
    Verdict { prediction, rule: rule.to_string(), drift: None }
}

/// `value` against `threshold`, or `None` inside the band.
fn side(value: f64, threshold: f64) -> Option<Ordering> {
    if (value - threshold).abs() < THRESHOLD_BAND {
        None
    } else {
        value.partial_cmp(&threshold)
    }
}

macro_rules! compare {
    ($value:expr, $threshold:expr, $what:expr) => {
        match side($value, $threshold) {
            Some(o) => o,
            None => return verdict(Prediction::ThresholdCase, concat!("within the band of ", $what)),
        }
    };
}

// Both tolerances below 1/2, any dynamic. In the view, the red tolerance
// exceeds kappa_r, or neither exceeds its kappa.
fn low_rules(v: &View) -> Verdict {
    use Ordering::*;
    let g_vs_k = compare!(v.g(), v.th.kappa_g, "kappa_g");
    let r_vs_k = compare!(v.r(), v.th.kappa_r, "kappa_r");
    match (g_vs_k, r_vs_k) {
        (Less, Less) => verdict(Prediction::StaticAE, "both tolerances below their kappa thresholds"),
        (_, Greater) => match v.dom {
            Domination::Boundary => verdict(Prediction::ThresholdCase, "on the domination boundary"),
            Domination::GreenDominating => verdict(
                Prediction::GreenTakeoverAE,
                "tau_g < 1/2, kappa_r < tau_r < 1/2 and green dominating: green takes over almost everywhere",
            ),
            Domination::RedDominating if g_vs_k == Greater => verdict(
                Prediction::RedTakeoverAE,
                "tau_r < 1/2, kappa_g < tau_g < 1/2 and red dominating: red takes over almost everywhere",
            ),
            Domination::RedDominating => match side(v.g(), 0.5 * v.rho) {
                Some(Greater) => verdict(
                    Prediction::StaticAE,
                    "tau_g < kappa_g, kappa_r < tau_r < 1/2, red dominating and tau_g > rho/2: static almost everywhere",
                ),
                _ => Verdict {
                    prediction: Prediction::OpenQ1,
                    rule: "tau_g < kappa_g, kappa_r < tau_r < 1/2, red dominating and tau_g <= rho/2: open".into(),
                    drift: Some(eval_z(1.0 - v.g(), 1.0 - v.rho)),
                },
            },
        },
        _ => unreachable!("handled by the colour-exchanged view"),
    }
}

// Both tolerances above 1/2 under the selective dynamic. In the view, the
// green tolerance is below mu_g, or both exceed their mu.
fn high_selective_rules(v: &View) -> Verdict {
    use Ordering::*;
    let g_vs_m = compare!(v.g(), v.th.mu_g, "mu_g");
    let r_vs_m = compare!(v.r(), v.th.mu_r, "mu_r");
    match (g_vs_m, r_vs_m) {
        (Greater, Greater) => verdict(Prediction::StaticAE, "both tolerances above their mu thresholds"),
        (Less, _) => match v.dom {
            Domination::Boundary => verdict(Prediction::ThresholdCase, "on the domination boundary"),
            Domination::GreenDominating => verdict(
                Prediction::GreenTakeoverAE,
                "1/2 < tau_g < mu_g, tau_r > 1/2 and green dominating: green takes over almost everywhere",
            ),
            Domination::RedDominating if r_vs_m == Less => verdict(
                Prediction::RedTakeoverAE,
                "1/2 < tau_r < mu_r, tau_g > 1/2 and red dominating: red takes over almost everywhere",
            ),
            Domination::RedDominating => match side(v.r(), 1.0 - 0.5 * v.rho) {
                Some(Less) => verdict(
                    Prediction::StaticAE,
                    "1/2 < tau_g < mu_g, tau_r > mu_r, red dominating and tau_r < 1 - rho/2: static almost everywhere",
                ),
                _ => Verdict {
                    prediction: Prediction::OpenQ2,
                    rule: "1/2 < tau_g < mu_g, tau_r > mu_r, red dominating and tau_r >= 1 - rho/2: open".into(),
                    drift: Some(eval_z(v.r(), 1.0 - v.rho)),
                },
            },
        },
        _ => unreachable!("handled by the colour-exchanged view"),
    }
}

// Both tolerances above 1/2 under the other dynamics.
fn high_other_rules(v: &View, dynamic: Dynamic) -> Verdict {
    let two_thirds = Tolerance::new(2, 3).expect("valid");
    if dynamic == Dynamic::Synchronous {
        if v.tau_g < two_thirds && v.tau_g < v.tau_r {
            return verdict(
                Prediction::GreenTotal,
                "synchronous, 1/2 < tau_g < 2/3 and tau_g < tau_r: green takes over totally",
            );
        }
        if v.tau_r < two_thirds && v.tau_r < v.tau_g {
            return verdict(
                Prediction::RedTotal,
                "synchronous, 1/2 < tau_r < 2/3 and tau_r < tau_g: red takes over totally",
            );
        }
    }
    match v.tau_g.cmp(&v.tau_r) {
        Ordering::Less => verdict(Prediction::ConjecturedGreenTotal, "1/2 < tau_g < tau_r: green expected to take over totally"),
        Ordering::Greater => verdict(Prediction::ConjecturedRedTotal, "1/2 < tau_r < tau_g: red expected to take over totally"),
        Ordering::Equal => verdict(Prediction::ConjecturedCoinFlip, "1/2 < tau_g = tau_r: either colour expected to take over"),
    }
}

/// Predicts the outcome of a scenario under `dynamic`. The perturbed
/// dynamic is classified as incremental.
pub fn classify(scenario: &Scenario, dynamic: Dynamic) -> Result<Classification, ThresholdError> {
    let thresholds = ThresholdSet::new(scenario.rho())?;
    Ok(classify_with(scenario, dynamic, &thresholds))
}

/// As [`classify`] with precomputed thresholds for `scenario.rho()`.
pub fn classify_with(scenario: &Scenario, dynamic: Dynamic, thresholds: &ThresholdSet) -> Classification {
    let domination = domination(scenario.rho(), scenario.tau_g().to_f64(), scenario.tau_r().to_f64());
    let view = View {
        rho: scenario.rho(),
        tau_g: scenario.tau_g(),
        tau_r: scenario.tau_r(),
        th: *thresholds,
        dom: domination.label,
        swapped: false,
    };
    let v = decide(&view, dynamic);
    Classification {
        prediction: v.prediction,
        rule: v.rule,
        thresholds: *thresholds,
        domination,
        firewall_drift: v.drift,
    }
}

fn decide(view: &View, dynamic: Dynamic) -> Verdict {
    use Ordering::*;
    let (g_half, r_half) = (view.tau_g.cmp_half(), view.tau_r.cmp_half());
    if g_half == Equal || r_half == Equal {
        return verdict(Prediction::ThresholdCase, "a tolerance equals 1/2");
    }
    // rules are stated for one colour role; the other is read off the
    // exchanged view and mapped back
    let (v, result) = match (g_half, r_half) {
        (Less, Greater) => (*view, verdict(Prediction::GreenTotal, "tau_g < 1/2 < tau_r: green takes over totally")),
        (Greater, Less) => {
            let v = view.swap();
            (v, verdict(Prediction::GreenTotal, "tau_g < 1/2 < tau_r: green takes over totally"))
        }
        (Less, Less) => {
            let v = if side(view.r(), view.th.kappa_r) == Some(Less) && side(view.g(), view.th.kappa_g) == Some(Greater) {
                view.swap()
            } else {
                *view
            };
            (v, low_rules(&v))
        }
        _ if dynamic == Dynamic::Selective => {
            let v = if side(view.g(), view.th.mu_g) == Some(Greater) && side(view.r(), view.th.mu_r) == Some(Less) {
                view.swap()
            } else {
                *view
            };
            (v, high_selective_rules(&v))
        }
        _ => (*view, high_other_rules(view, dynamic)),
    };
    if v.swapped {
        Verdict {
            prediction: result.prediction.swapped(),
            rule: format!("{} (colours exchanged)", result.rule),
            drift: result.drift,
        }
    } else {
        result
    }
}

/// `floor((1 - tau)(2w + 1)) + 1`: the number of forced errors needed to
/// leave the monochromatic state of the other colour, where `tau` is the
/// tolerance of that other colour.
pub fn stochastic_potential(tau: Tolerance, w: usize) -> u64 {
    tau.complement().floor_times(2 * w as u64 + 1) + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StochasticStability {
    /// Potential of the all-green state.
    pub green: u64,
    /// Potential of the all-red state.
    pub red: u64,
    /// The colour of the state with smaller potential, `None` on a tie.
    pub stable: Option<Color>,
}

pub fn stochastic_stability(scenario: &Scenario, w: usize) -> StochasticStability {
    let green = stochastic_potential(scenario.tau_r(), w);
    let red = stochastic_potential(scenario.tau_g(), w);
    let stable = match green.cmp(&red) {
        Ordering::Less => Some(Color::Green),
        Ordering::Greater => Some(Color::Red),
        Ordering::Equal => None,
    };
    StochasticStability { green, red, stable }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{eval_f, eval_g};
    use crate::tolerance::parse_tolerance;
    use rand::{Rng, SeedableRng};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn scen(rho: f64, g: &str, r: &str) -> Scenario {
        Scenario::parse(rho, g, r).unwrap()
    }

    #[test]
    fn kappa_values() {
        assert!(close(kappa_g(0.5).unwrap(), 0.353092313, 1e-6));
        assert!(close(kappa_r(0.5).unwrap(), 0.353092313, 1e-6));
        assert!(close(kappa_g(0.7).unwrap(), 0.48, 0.005));
        assert_eq!(kappa_g(0.8).unwrap(), 0.5);
        assert!(close(kappa_r(0.7).unwrap(), 0.21, 0.005));
        assert!(close(kappa_r(0.74).unwrap(), 0.186, 0.005));
        assert_eq!(kappa_r(0.2).unwrap(), 0.5);
        assert!(kappa_g(0.0).is_err());
    }

    #[test]
    fn kappa_solves_its_equation() {
        for i in 1..75 {
            let rho = i as f64 / 100.0;
            let k = kappa_g(rho).unwrap();
            assert!(close(eval_f(k).unwrap(), 1.0 / (2.0 * (1.0 - rho)), 1e-10));
            assert!(k < rho && k > 0.5 * rho, "rho={rho} k={k}");
        }
    }

    #[test]
    fn mu_values() {
        let (g, r) = mu_thresholds(0.5).unwrap();
        assert!(close(g, 0.64690768667, 1e-6) && close(r, 0.64690768667, 1e-6));
        let (g, r) = mu_thresholds(0.4).unwrap();
        assert!(close(g, 0.5812, 1e-3) && close(r, 0.7155, 1e-3));
        let (g, r) = mu_thresholds(0.6).unwrap();
        assert!(close(g, 0.7155, 1e-3) && close(r, 0.5812, 1e-3));
        assert!(close(eval_g(g).unwrap(), 1.0 / 1.2, 1e-10));
    }

    #[test]
    fn mu_is_one_minus_kappa_and_mirrors() {
        for i in 1..20 {
            let rho = i as f64 / 20.0;
            let t = ThresholdSet::new(rho).unwrap();
            assert!(close(t.mu_g, 1.0 - t.kappa_r, 1e-9), "rho={rho}");
            assert!(close(t.mu_r, 1.0 - t.kappa_g, 1e-9), "rho={rho}");
            let m = ThresholdSet::new(1.0 - rho).unwrap();
            assert!(close(t.kappa_g, m.kappa_r, 1e-12));
            assert!(close(t.mu_g, m.mu_r, 1e-12));
        }
    }

    #[test]
    fn domination_examples() {
        assert_eq!(domination(0.3, 0.4, 0.6).label, Domination::RedDominating);
        assert!(domination(0.3, 0.4, 0.6).boundary_extended);
        assert_eq!(domination(0.5, 0.3, 0.4).label, Domination::GreenDominating);
        for t in [0.1, 0.3, 0.45, 0.7, 0.9] {
            assert_eq!(domination(0.5, t, t).label, Domination::Boundary);
        }
    }

    #[test]
    fn domination_is_swap_symmetric_and_monotone() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2_000 {
            let rho: f64 = rng.gen_range(0.01..0.99);
            let g: f64 = rng.gen_range(0.01..0.99);
            let r: f64 = rng.gen_range(0.01..0.99);
            let d = domination(rho, g, r).label;
            assert_eq!(domination(1.0 - rho, r, g).label, d.swapped());
            // raising tau_g or lowering tau_r keeps red domination
            if d == Domination::RedDominating && (g + 0.01 + r - 1.0).abs() > 1e-3 && ((g + r < 1.0) == (g + 0.01 + r < 1.0)) {
                assert_ne!(domination(rho, g + 0.01, r).label, Domination::GreenDominating);
            }
        }
    }

    #[test]
    fn small_rho_is_red_dominating_on_triangles() {
        for rho in [0.05, 0.1, 0.2] {
            for i in 1..50 {
                for j in 1..50 {
                    let (g, r) = (i as f64 / 100.0, j as f64 / 100.0);
                    assert_eq!(domination(rho, g, r).label, Domination::RedDominating, "low {rho} {g} {r}");
                    assert_eq!(domination(rho, 0.5 + g, 0.5 + r).label, Domination::RedDominating, "high {rho}");
                }
            }
        }
    }

    #[test]
    fn lambda_value() {
        let l = lambda().unwrap();
        assert!(close(l.lambda, 0.38493708, 1e-4));
        assert!(close(l.kappa_g, 0.27407242, 1e-4));
        assert!(close(l.kappa_r, 0.42832491, 1e-4));
        assert!(l.residual.abs() < 1e-9);
        assert!(l.dual_residual.is_finite());
    }

    #[test]
    fn classify_examples() {
        let c = |rho, g, r| classify(&scen(rho, g, r), Dynamic::Selective).unwrap().prediction;
        assert_eq!(c(0.2, "0.25", "0.65"), Prediction::GreenTotal);
        assert_eq!(c(0.4, "0.65", "0.75"), Prediction::StaticAE);
        assert_eq!(c(0.3, "0.13", "0.49"), Prediction::OpenQ1);
        assert_eq!(c(0.6, "0.43", "0.27"), Prediction::StaticAE);
        assert_eq!(c(0.48, "0.38", "0.46"), Prediction::GreenTakeoverAE);
        assert_eq!(c(0.5, "0.5", "0.3"), Prediction::ThresholdCase);
        assert_eq!(c(0.5, "0.2", "0.25"), Prediction::StaticAE);
    }

    #[test]
    fn open_region_drift_matches_text_example() {
        let cl = classify(&scen(0.74, "0.498", "0.07"), Dynamic::Selective).unwrap();
        assert_eq!(cl.prediction, Prediction::OpenQ1);
        assert!(close(cl.firewall_drift.unwrap(), -0.06, 0.005));
        let cl = classify(&scen(0.74, "0.93", "0.502"), Dynamic::Selective).unwrap();
        assert_eq!(cl.prediction, Prediction::OpenQ2);
        assert!(close(cl.firewall_drift.unwrap(), -0.06, 0.005));
    }

    #[test]
    fn high_tolerances_other_dynamics() {
        let c = |g, r, d| classify(&scen(0.5, g, r), d).unwrap().prediction;
        assert_eq!(c("0.6", "0.7", Dynamic::Synchronous), Prediction::GreenTotal);
        assert_eq!(c("0.7", "0.6", Dynamic::Synchronous), Prediction::RedTotal);
        assert_eq!(c("0.7", "0.8", Dynamic::Synchronous), Prediction::ConjecturedGreenTotal);
        assert_eq!(c("0.6", "0.7", Dynamic::Incremental), Prediction::ConjecturedGreenTotal);
        assert_eq!(c("0.6", "0.6", Dynamic::Incremental), Prediction::ConjecturedCoinFlip);
    }

    #[test]
    fn classify_swap_invariance_sample() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let dynamics = [Dynamic::Selective, Dynamic::Incremental, Dynamic::Synchronous];
        for _ in 0..2_000 {
            let rho = rng.gen_range(1..1000) as f64 / 1000.0;
            let g = Tolerance::new(rng.gen_range(1..1000), 1000).unwrap();
            let r = Tolerance::new(rng.gen_range(1..1000), 1000).unwrap();
            let d = dynamics[rng.gen_range(0..3)];
            let a = classify(&Scenario::new(rho, g, r).unwrap(), d).unwrap().prediction;
            let b = classify(&Scenario::new(1.0 - rho, r, g).unwrap(), d).unwrap().prediction;
            assert_eq!(a, b.swapped(), "rho={rho} g={g} r={r} {d}");
        }
    }

    #[test]
    fn potentials() {
        let t = |s: &str| parse_tolerance(s).unwrap();
        assert_eq!(stochastic_potential(t("3/4"), 2), 2);
        let s = stochastic_stability(&scen(0.5, "3/5", "7/10"), 10);
        assert_eq!((s.red, s.green, s.stable), (9, 7, Some(Color::Green)));
        let s = stochastic_stability(&scen(0.5, "0.6", "0.6"), 10);
        assert_eq!(s.stable, None);
    }
}
