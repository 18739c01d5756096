//! Stable intervals, intractable intervals, firewalls, censuses and run
//! statistics.

use std::fmt;

use num_rational::Ratio;

use crate::dynamics::{ChangeEvent, RunRecord, Termination};
use crate::ring::{Color, NodeStatus, Ring};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntervalKind {
    StablyGreen,
    StablyRed,
    GreenIntractable,
    RedIntractable,
    GreenFirewall,
    RedFirewall,
}

impl fmt::Display for IntervalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntervalKind::StablyGreen => "stably-green",
            IntervalKind::StablyRed => "stably-red",
            IntervalKind::GreenIntractable => "green-intractable",
            IntervalKind::RedIntractable => "red-intractable",
            IntervalKind::GreenFirewall => "green-firewall",
            IntervalKind::RedFirewall => "red-firewall",
        })
    }
}

/// A run of `length` nodes starting at `start` and continuing clockwise,
/// possibly wrapping past node `n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalReport {
    pub kind: IntervalKind,
    pub start: usize,
    pub length: usize,
}

/// Number of nodes of `color` in each window `[a, a + w]`, indexed by `a`.
fn half_window_counts(ring: &Ring, color: Color) -> Vec<u64> {
    let n = ring.n();
    let len = ring.w() + 1;
    let colors = ring.colors();
    let hit = |x: usize| (colors[x % n] == color) as u64;
    let mut c: u64 = (0..len).map(hit).sum();
    let mut out = Vec::with_capacity(n);
    for a in 0..n {
        out.push(c);
        c += hit(a + len);
        c -= hit(a);
    }
    out
}

fn tolerance_for(ring: &Ring, color: Color) -> Tolerance {
    match color {
        Color::Green => ring.scenario().tau_g(),
        Color::Red => ring.scenario().tau_r(),
    }
}

/// Every `[a, a + w]` holding at least `tau (2w + 1)` nodes of `color`, with
/// `tau` the tolerance of that colour.
pub fn find_stable_intervals(ring: &Ring, color: Color) -> Vec<IntervalReport> {
    let tau = tolerance_for(ring, color);
    let window = ring.window() as u64;
    let kind = match color {
        Color::Green => IntervalKind::StablyGreen,
        Color::Red => IntervalKind::StablyRed,
    };
    half_window_counts(ring, color)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| tau.is_met(c, window))
        .map(|(a, _)| IntervalReport { kind, start: a, length: ring.w() + 1 })
        .collect()
}

/// Every `[a, a + w]` in which nodes of `color` number fewer than
/// `tau (2w + 1) - (w + 1)`, so that no node of the other colour inside can
/// become hopeful.
pub fn find_intractable_intervals(ring: &Ring, color: Color) -> Vec<IntervalReport> {
    let tau = tolerance_for(ring, color);
    let window = ring.window() as u64;
    let len = ring.w() as u64 + 1;
    let kind = match color {
        Color::Green => IntervalKind::GreenIntractable,
        Color::Red => IntervalKind::RedIntractable,
    };
    half_window_counts(ring, color)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| !tau.is_met(c + len, window))
        .map(|(a, _)| IntervalReport { kind, start: a, length: ring.w() + 1 })
        .collect()
}

/// Maximal runs of `color` of length at least `w + 1`.
pub fn find_firewalls(ring: &Ring, color: Color) -> Vec<IntervalReport> {
    find_runs(ring, color, ring.w() + 1)
}

/// Maximal runs of `color` of length at least `min_len`. A monochromatic
/// ring is a single run of length `n` starting at node 0.
pub fn find_runs(ring: &Ring, color: Color, min_len: usize) -> Vec<IntervalReport> {
    let n = ring.n();
    let colors = ring.colors();
    let kind = match color {
        Color::Green => IntervalKind::GreenFirewall,
        Color::Red => IntervalKind::RedFirewall,
    };
    let Some(anchor) = colors.iter().position(|&c| c != color) else {
        return if n >= min_len { vec![IntervalReport { kind, start: 0, length: n }] } else { Vec::new() };
    };
    let mut out = Vec::new();
    let mut run_start = None;
    // scan one full turn starting just after a node of the other colour
    for k in 1..=n {
        let x = (anchor + k) % n;
        if colors[x] == color {
            run_start.get_or_insert(x);
        } else if let Some(s) = run_start.take() {
            let length = (x + n - s) % n;
            if length >= min_len {
                out.push(IntervalReport { kind, start: s, length });
            }
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Census {
    pub happy_green: usize,
    pub unhappy_green: usize,
    pub hopeful_green: usize,
    pub happy_red: usize,
    pub unhappy_red: usize,
    pub hopeful_red: usize,
    pub stable_green: usize,
    pub stable_red: usize,
    pub intractable_green: usize,
    pub intractable_red: usize,
}

pub fn census(ring: &Ring) -> Census {
    let mut c = Census::default();
    for x in 0..ring.n() {
        let status = ring.node_status(x);
        let (happy, unhappy, hopeful) = match ring.color(x) {
            Color::Green => (&mut c.happy_green, &mut c.unhappy_green, &mut c.hopeful_green),
            Color::Red => (&mut c.happy_red, &mut c.unhappy_red, &mut c.hopeful_red),
        };
        match status {
            NodeStatus::Happy => *happy += 1,
            NodeStatus::UnhappyHopeless => *unhappy += 1,
            NodeStatus::Hopeful => {
                *unhappy += 1;
                *hopeful += 1;
            }
        }
    }
    let window = ring.window() as u64;
    let len = ring.w() as u64 + 1;
    let (tg, tr) = (ring.scenario().tau_g(), ring.scenario().tau_r());
    for g in half_window_counts(ring, Color::Green) {
        let r = len - g;
        c.stable_green += tg.is_met(g, window) as usize;
        c.stable_red += tr.is_met(r, window) as usize;
        c.intractable_green += !tg.is_met(g + len, window) as usize;
        c.intractable_red += !tr.is_met(r + len, window) as usize;
    }
    c
}

/// `theta* = m / (2w + 1)` with `m` least such that `theta* > 1 - tau_r`: the
/// least local green density at which a red node is unhappy.
pub fn theta_star(tau_r: Tolerance, w: usize) -> Ratio<u64> {
    let window = 2 * w as u64 + 1;
    Ratio::new(tau_r.complement().floor_times(window) + 1, window)
}

/// Nodes whose local green density equals `theta` exactly.
pub fn nodes_with_density(ring: &Ring, theta: Ratio<u64>) -> Vec<usize> {
    let window = ring.window() as u64;
    (0..ring.n())
        .filter(|&x| Ratio::new(ring.green_count(x) as u64, window) == theta)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub initial_green_fraction: f64,
    pub final_green_fraction: f64,
    pub changed_fraction: f64,
    pub steps: u64,
    pub termination: Termination,
}

pub fn run_statistics(record: &RunRecord) -> RunSummary {
    let n = record.n as f64;
    RunSummary {
        initial_green_fraction: record.initial_green_count as f64 / n,
        final_green_fraction: record.final_green_count as f64 / n,
        changed_fraction: record.changed_node_count as f64 / n,
        steps: record.steps_executed,
        termination: record.termination,
    }
}

/// Applies an event log to an initial colouring. Every event must change
/// the colour of its node.
pub fn replay(initial: &[Color], events: &[ChangeEvent]) -> Result<Vec<Color>, String> {
    let mut colors = initial.to_vec();
    for e in events {
        let c = colors.get_mut(e.node).ok_or_else(|| format!("event node {} outside the ring", e.node))?;
        if *c == e.new_color {
            return Err(format!("event at time {} does not change node {}", e.time, e.node));
        }
        *c = e.new_color;
    }
    Ok(colors)
}
