//! Exact initial-configuration probabilities of local events, with an
//! optional Monte-Carlo cross-check.

use rand_distr::{Bernoulli, Binomial, Distribution};

use crate::numerics::{binom_tail_clamped, NumericsError, TailDirection, TailQuery};
use crate::rng::{rng_for, STREAM_PROBE};
use crate::tolerance::{Scenario, Tolerance};

/// Cutoffs for one colour, with `W = 2w + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutoffs {
    /// `floor((1 - tau) W) + 1`: opposite-colour neighbours making a node
    /// unhappy.
    pub unhappy: i64,
    /// `ceil(tau W) - 1`: same-colour neighbours (besides the node) needed
    /// for happiness.
    pub happy: i64,
    /// `ceil((tau - 1/2) W) - 1`.
    pub intractable_approx: i64,
    /// `ceil(tau W) - w - 2`: the largest same-colour count in `w + 1`
    /// nodes leaving every opposite node inside without hope.
    pub intractable: i64,
}

impl Cutoffs {
    pub fn new(tau: Tolerance, w: usize) -> Cutoffs {
        let window = 2 * w as u64 + 1;
        let need = tau.min_count(window) as i64;
        let (num, den) = (tau.numerator() as i128, tau.denominator() as i128);
        // ceil((2 num W - den W) / (2 den))
        let top = (2 * num - den) * window as i128;
        let half = top.div_euclid(2 * den) + (top.rem_euclid(2 * den) != 0) as i128;
        Cutoffs {
            unhappy: tau.complement().floor_times(window) as i64 + 1,
            happy: need - 1,
            intractable_approx: half as i64 - 1,
            intractable: need - w as i64 - 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport {
    pub scenario: Scenario,
    pub w: usize,
    pub green_cutoffs: Cutoffs,
    pub red_cutoffs: Cutoffs,
    /// A green node is unhappy.
    pub u_g: f64,
    pub u_r: f64,
    /// `[b, b + w]` is stably green, given `b` green.
    pub s0_g: f64,
    pub s0_r: f64,
    /// A green node is hopeful.
    pub f_g: f64,
    /// A red node is hopeful.
    pub f_r: f64,
    /// Binomial approximation of `t_g`.
    pub t_g_approx: f64,
    pub t_r_approx: f64,
    /// A fixed interval of `w + 1` nodes is green intractable.
    pub t_g: f64,
    pub t_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeEstimate {
    pub name: &'static str,
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
}

impl ProbeEstimate {
    /// Whether the estimate lies within `k` standard errors of the exact
    /// value (with one sample of slack for degenerate probabilities).
    pub fn within(&self, k: f64, samples: u64) -> bool {
        (self.estimate - self.exact).abs() <= k * self.std_error + 1.0 / samples as f64
    }
}

fn at_least(trials: usize, p: f64, k: i64) -> Result<f64, NumericsError> {
    binom_tail_clamped(&TailQuery::new(trials as u64, p, k, TailDirection::AtLeast))
}

fn at_most(trials: usize, p: f64, k: i64) -> Result<f64, NumericsError> {
    binom_tail_clamped(&TailQuery::new(trials as u64, p, k, TailDirection::AtMost))
}

pub fn probe(scenario: &Scenario, w: usize) -> Result<ProbeReport, NumericsError> {
    let rho = scenario.rho();
    let sigma = 1.0 - rho;
    let g = Cutoffs::new(scenario.tau_g(), w);
    let r = Cutoffs::new(scenario.tau_r(), w);
    Ok(ProbeReport {
        scenario: *scenario,
        w,
        green_cutoffs: g,
        red_cutoffs: r,
        u_g: at_least(2 * w, sigma, g.unhappy)?,
        u_r: at_least(2 * w, rho, r.unhappy)?,
        s0_g: at_least(w, rho, g.happy)?,
        s0_r: at_least(w, sigma, r.happy)?,
        f_g: at_least(2 * w, sigma, r.happy)?,
        f_r: at_least(2 * w, rho, g.happy)?,
        t_g_approx: at_most(w + 1, rho, g.intractable_approx)?,
        t_r_approx: at_most(w + 1, sigma, r.intractable_approx)?,
        t_g: at_most(w + 1, rho, g.intractable)?,
        t_r: at_most(w + 1, sigma, r.intractable)?,
    })
}

impl ProbeReport {
    pub fn entries(&self) -> [(&'static str, f64); 10] {
        [
            ("U_g", self.u_g),
            ("U_r", self.u_r),
            ("S0_g", self.s0_g),
            ("S0_r", self.s0_r),
            ("F_g", self.f_g),
            ("F_r", self.f_r),
            ("T'_g", self.t_g_approx),
            ("T'_r", self.t_r_approx),
            ("T_g", self.t_g),
            ("T_r", self.t_r),
        ]
    }

    /// Estimates every probability from `samples` independent draws of a
    /// neighbourhood in the initial configuration.
    pub fn monte_carlo(&self, samples: u64, seed: u64) -> Vec<ProbeEstimate> {
        let w = self.w as u64;
        let rho = self.scenario.rho();
        let mut rng = rng_for(seed, STREAM_PROBE);
        let half = Binomial::new(w, rho).expect("valid probability");
        let centre = Bernoulli::new(rho).expect("valid probability");
        let (g, r) = (self.green_cutoffs, self.red_cutoffs);
        let mut hits = [0u64; 10];
        for _ in 0..samples {
            // greens left of, right of and at the centre
            let left = half.sample(&mut rng) as i64;
            let right = half.sample(&mut rng) as i64;
            let c = centre.sample(&mut rng) as i64;
            let w = w as i64;
            let others = left + right;
            let flags = [
                2 * w - others >= g.unhappy,
                others >= r.unhappy,
                right >= g.happy,
                w - right >= r.happy,
                2 * w - others >= r.happy,
                others >= g.happy,
                c + right <= g.intractable_approx,
                w + 1 - c - right <= r.intractable_approx,
                c + right <= g.intractable,
                w + 1 - c - right <= r.intractable,
            ];
            for (h, f) in hits.iter_mut().zip(flags) {
                *h += f as u64;
            }
        }
        self.entries()
            .into_iter()
            .zip(hits)
            .map(|((name, exact), h)| {
                let estimate = h as f64 / samples as f64;
                ProbeEstimate { name, exact, estimate, std_error: (exact * (1.0 - exact) / samples as f64).sqrt() }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::parse_tolerance;

    fn scen(rho: f64, g: &str, r: &str) -> Scenario {
        Scenario::parse(rho, g, r).unwrap()
    }

    #[test]
    fn cutoffs_match_their_definitions() {
        for t in ["0.1", "0.38", "0.5", "0.52", "0.65", "2/3", "0.9"] {
            let tau = parse_tolerance(t).unwrap();
            for w in 1..40usize {
                let window = 2 * w as u64 + 1;
                let c = Cutoffs::new(tau, w);
                let x = tau.to_f64() * window as f64;
                assert_eq!(c.happy, x.ceil() as i64 - 1, "{t} {w}");
                assert_eq!(c.unhappy, ((1.0 - tau.to_f64()) * window as f64 + 1e-9).floor() as i64 + 1);
                let y = (tau.to_f64() - 0.5) * window as f64;
                assert_eq!(c.intractable_approx, (y - 1e-9).ceil() as i64 - 1, "{t} {w}");
                for count in 0..=(w as i64 + 1) {
                    let hopeless = !tau.is_met(count as u64 + w as u64 + 1, window);
                    assert_eq!(count <= c.intractable, hopeless);
                }
                for others in 0..=(2 * w as u64) {
                    assert_eq!(others as i64 >= c.happy, tau.is_met(others + 1, window));
                    let opposite = 2 * w as u64 - others;
                    assert_eq!(opposite as i64 >= c.unhappy, !tau.is_met(others + 1, window));
                }
            }
        }
    }

    #[test]
    fn no_stable_interval_above_one_half() {
        for w in [5, 20, 80] {
            let p = probe(&scen(0.5, "0.55", "0.6"), w).unwrap();
            assert_eq!(p.s0_g, 0.0);
            assert_eq!(p.s0_r, 0.0);
        }
    }

    #[test]
    fn unhappy_red_hoeffding_bound() {
        let rho = 0.5;
        let tau_r = 0.45;
        let gamma: f64 = 1.0 - rho - tau_r;
        for w in [10, 50, 200, 1000] {
            let p = probe(&scen(rho, "0.3", "0.45"), w).unwrap();
            let bound = (-2.0 * gamma * gamma * (2 * w + 1) as f64).exp();
            assert!(p.u_r <= bound, "w={w} u_r={} bound={bound}", p.u_r);
        }
    }

    #[test]
    fn tolerance_equal_to_density_limits() {
        let mut last = f64::INFINITY;
        for w in [200, 400, 800, 1600] {
            let p = probe(&scen(0.3, "0.3", "0.4"), w).unwrap();
            assert!(p.u_g > 0.4 && p.u_g < 0.6, "w={w} u_g={}", p.u_g);
            assert!(p.s0_g < last);
            last = p.s0_g;
        }
    }

    #[test]
    fn duals_swap() {
        let a = probe(&scen(0.37, "0.41", "0.63"), 25).unwrap();
        let b = probe(&scen(0.63, "0.63", "0.41"), 25).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.max(y).max(1e-300);
        assert!(close(a.u_g, b.u_r) && close(a.u_r, b.u_g));
        assert!(close(a.s0_g, b.s0_r) && close(a.f_g, b.f_r) && close(a.f_r, b.f_g));
        assert!(close(a.t_g, b.t_r) && close(a.t_g_approx, b.t_r_approx));
    }

    #[test]
    fn monte_carlo_agrees() {
        let samples = 200_000;
        let p = probe(&scen(0.45, "0.42", "0.58"), 12).unwrap();
        for e in p.monte_carlo(samples, 11) {
            assert!(e.within(5.0, samples), "{e:?}");
        }
    }
}
