//! The selective, incremental, synchronous and perturbed dynamics.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::harmony::{HarmonyError, HarmonyMonitor};
use crate::ring::{Color, Ring};
use crate::rng::{rng_for, SimRng, STREAM_DYNAMICS};
use crate::tolerance::Scenario;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dynamic {
    Selective,
    Incremental,
    Synchronous,
    /// Incremental steps, except that with probability `epsilon` a uniformly
    /// random node changes colour instead.
    PerturbedIncremental { epsilon: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicError {
    #[error("perturbation probability {0} is outside the open interval (0, 1)")]
    Epsilon(f64),
    #[error("unknown dynamic {0:?}; expected selective, incremental, synchronous or perturbed:EPS")]
    Unknown(String),
}

impl Dynamic {
    pub fn perturbed(epsilon: f64) -> Result<Dynamic, DynamicError> {
        if epsilon > 0.0 && epsilon < 1.0 {
            Ok(Dynamic::PerturbedIncremental { epsilon })
        } else {
            Err(DynamicError::Epsilon(epsilon))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Dynamic::Selective => "selective",
            Dynamic::Incremental => "incremental",
            Dynamic::Synchronous => "synchronous",
            Dynamic::PerturbedIncremental { .. } => "perturbed",
        }
    }
}

impl fmt::Display for Dynamic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dynamic::PerturbedIncremental { epsilon } => write!(f, "perturbed:{epsilon}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Dynamic {
    type Err = DynamicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "selective" => Ok(Dynamic::Selective),
            "incremental" => Ok(Dynamic::Incremental),
            "synchronous" => Ok(Dynamic::Synchronous),
            _ => {
                let eps = t
                    .strip_prefix("perturbed:")
                    .ok_or_else(|| DynamicError::Unknown(s.to_string()))?
                    .parse::<f64>()
                    .map_err(|_| DynamicError::Unknown(s.to_string()))?;
                Dynamic::perturbed(eps)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChangeEvent {
    pub time: u64,
    pub node: usize,
    pub new_color: Color,
}

fn flip_event(ring: &mut Ring, x: usize, time: u64) -> ChangeEvent {
    ring.flip(x);
    ChangeEvent { time, node: x, new_color: ring.color(x) }
}

/// Flips a uniformly chosen hopeful node, if any.
pub fn step_selective<R: Rng + ?Sized>(ring: &mut Ring, rng: &mut R, time: u64) -> Option<ChangeEvent> {
    let x = ring.hopeful_set().sample(rng)?;
    Some(flip_event(ring, x, time))
}

/// Flips a uniformly chosen unhappy node, if any.
pub fn step_incremental<R: Rng + ?Sized>(ring: &mut Ring, rng: &mut R, time: u64) -> Option<ChangeEvent> {
    let x = ring.unhappy_set().sample(rng)?;
    Some(flip_event(ring, x, time))
}

/// Flips every currently unhappy node at once. Events are in node order and
/// share the timestamp `time`.
pub fn step_synchronous(ring: &mut Ring, time: u64) -> Vec<ChangeEvent> {
    let nodes = ring.unhappy_set().sorted();
    ring.flip_many(&nodes);
    nodes.into_iter().map(|x| ChangeEvent { time, node: x, new_color: ring.color(x) }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerturbedStep {
    pub event: Option<ChangeEvent>,
    /// Whether the random-error branch was taken.
    pub forced: bool,
}

/// One step of the perturbed chain. A step whose incremental branch finds
/// no unhappy node changes nothing.
pub fn step_perturbed<R: Rng + ?Sized>(
    ring: &mut Ring,
    epsilon: f64,
    rng: &mut R,
    time: u64,
) -> Result<PerturbedStep, DynamicError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(DynamicError::Epsilon(epsilon));
    }
    if rng.gen_bool(epsilon) {
        let x = rng.gen_range(0..ring.n());
        return Ok(PerturbedStep { event: Some(flip_event(ring, x, time)), forced: true });
    }
    Ok(PerturbedStep { event: step_incremental(ring, rng, time), forced: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Finished,
    StepCapReached,
    /// The synchronous dynamic returned to an earlier state.
    CycleDetected { period: u64 },
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::Finished => f.write_str("finished"),
            Termination::StepCapReached => f.write_str("step-cap"),
            Termination::CycleDetected { period } => write!(f, "cycle:{period}"),
        }
    }
}

impl FromStr for Termination {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "finished" => Ok(Termination::Finished),
            "step-cap" => Ok(Termination::StepCapReached),
            t => t
                .strip_prefix("cycle:")
                .and_then(|p| p.parse().ok())
                .map(|period| Termination::CycleDetected { period })
                .ok_or_else(|| format!("unknown termination {s:?}")),
        }
    }
}

/// Default step cap for a ring of `n` nodes.
pub fn default_max_steps(n: usize) -> u64 {
    50 * n as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dynamic: Dynamic,
    pub max_steps: u64,
    /// Seeds the dynamics stream; the same value usually also seeded the ring.
    pub seed: u64,
    pub record_events: bool,
    /// Keep the initial and final colourings in the record.
    pub keep_snapshots: bool,
    /// Check the harmony index at every flip (selective only).
    pub monitor: bool,
}

impl RunConfig {
    pub fn new(dynamic: Dynamic, max_steps: u64, seed: u64) -> Self {
        RunConfig { dynamic, max_steps, seed, record_events: true, keep_snapshots: true, monitor: false }
    }

    pub fn summary_only(mut self) -> Self {
        self.record_events = false;
        self.keep_snapshots = false;
        self
    }

    pub fn with_monitor(mut self) -> Self {
        self.monitor = true;
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("max_steps must be at least 1")]
    ZeroSteps,
    #[error("the harmony monitor applies to the selective dynamic only")]
    MonitorUnsupported,
    #[error(transparent)]
    Harmony(#[from] HarmonyError),
    #[error(transparent)]
    Dynamic(#[from] DynamicError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub scenario: Scenario,
    pub n: usize,
    pub w: usize,
    pub seed: u64,
    pub dynamic: Dynamic,
    pub events: Vec<ChangeEvent>,
    pub events_recorded: bool,
    pub steps_executed: u64,
    pub termination: Termination,
    pub initial_green_count: usize,
    pub final_green_count: usize,
    pub changed_node_count: usize,
    pub initial_colors: Option<Vec<Color>>,
    pub final_colors: Option<Vec<Color>>,
    /// Flips taken by the error branch of the perturbed dynamic.
    pub forced_flips: u64,
}

struct Recorder {
    events: Vec<ChangeEvent>,
    record: bool,
    changed: Vec<bool>,
    changed_count: usize,
}

impl Recorder {
    fn push(&mut self, e: ChangeEvent) {
        if !self.changed[e.node] {
            self.changed[e.node] = true;
            self.changed_count += 1;
        }
        if self.record {
            self.events.push(e);
        }
    }
}

/// Runs `config.dynamic` on `ring` until it finishes, hits the step cap or,
/// for the synchronous dynamic, revisits a state.
pub fn run(ring: &mut Ring, config: &RunConfig) -> Result<RunRecord, RunError> {
    if config.max_steps == 0 {
        return Err(RunError::ZeroSteps);
    }
    let mut monitor = if config.monitor {
        if config.dynamic != Dynamic::Selective {
            return Err(RunError::MonitorUnsupported);
        }
        Some(HarmonyMonitor::new(ring)?)
    } else {
        None
    };
    let initial_colors = config.keep_snapshots.then(|| ring.colors().to_vec());
    let initial_green_count = ring.green_total();
    let mut rng: SimRng = rng_for(config.seed, STREAM_DYNAMICS);
    let mut rec = Recorder { events: Vec::new(), record: config.record_events, changed: vec![false; ring.n()], changed_count: 0 };
    let mut steps = 0u64;
    let mut forced_flips = 0u64;
    let mut seen: HashMap<u128, u64> = HashMap::new();
    let termination = loop {
        match config.dynamic {
            Dynamic::Selective if ring.hopeful_set().is_empty() => break Termination::Finished,
            Dynamic::Incremental | Dynamic::Synchronous if ring.unhappy_set().is_empty() => {
                break Termination::Finished
            }
            _ => {}
        }
        if steps >= config.max_steps {
            break Termination::StepCapReached;
        }
        let time = steps + 1;
        match config.dynamic {
            Dynamic::Selective => {
                let x = ring.hopeful_set().sample(&mut rng).expect("hopeful set checked non-empty");
                if let Some(m) = monitor.as_mut() {
                    m.record_flip(ring, x, time)?;
                }
                rec.push(flip_event(ring, x, time));
            }
            Dynamic::Incremental => {
                let e = step_incremental(ring, &mut rng, time).expect("unhappy set checked non-empty");
                rec.push(e);
            }
            Dynamic::Synchronous => {
                seen.insert(ring.state_hash(), steps);
                for e in step_synchronous(ring, time) {
                    rec.push(e);
                }
                if let Some(&earlier) = seen.get(&ring.state_hash()) {
                    steps = time;
                    break Termination::CycleDetected { period: time - earlier };
                }
            }
            Dynamic::PerturbedIncremental { epsilon } => {
                let s = step_perturbed(ring, epsilon, &mut rng, time)?;
                forced_flips += s.forced as u64;
                if let Some(e) = s.event {
                    rec.push(e);
                }
            }
        }
        steps = time;
    };
    Ok(RunRecord {
        scenario: *ring.scenario(),
        n: ring.n(),
        w: ring.w(),
        seed: config.seed,
        dynamic: config.dynamic,
        events: rec.events,
        events_recorded: config.record_events,
        steps_executed: steps,
        termination,
        initial_green_count,
        final_green_count: ring.green_total(),
        changed_node_count: rec.changed_count,
        initial_colors,
        final_colors: config.keep_snapshots.then(|| ring.colors().to_vec()),
        forced_flips,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn scen(rho: f64, g: &str, r: &str) -> Scenario {
        Scenario::parse(rho, g, r).unwrap()
    }

    fn rng(seed: u64) -> SimRng {
        SimRng::seed_from_u64(seed)
    }

    #[test]
    fn parses_dynamics() {
        assert_eq!("selective".parse::<Dynamic>().unwrap(), Dynamic::Selective);
        assert_eq!("perturbed:0.01".parse::<Dynamic>().unwrap(), Dynamic::PerturbedIncremental { epsilon: 0.01 });
        assert!("perturbed:1".parse::<Dynamic>().is_err());
        assert!("perturbed:0".parse::<Dynamic>().is_err());
        assert!("glauber".parse::<Dynamic>().is_err());
        for d in [Dynamic::Selective, Dynamic::Synchronous, Dynamic::perturbed(0.25).unwrap()] {
            assert_eq!(d.to_string().parse::<Dynamic>().unwrap(), d);
        }
    }

    #[test]
    fn empty_sets_give_no_event() {
        let s = scen(0.5, "0.3", "0.3");
        let mut ring = Ring::uniform(20, 2, Color::Green, &s).unwrap();
        assert!(step_selective(&mut ring, &mut rng(1), 1).is_none());
        assert!(step_incremental(&mut ring, &mut rng(1), 1).is_none());
        assert!(step_synchronous(&mut ring, 1).is_empty());
    }

    #[test]
    fn single_candidate_flips() {
        let s = scen(0.5, "0.3", "0.6");
        let mut colors = vec![Color::Green; 9];
        colors[4] = Color::Red;
        let mut ring = Ring::from_colors(colors, 1, &s).unwrap();
        assert_eq!(ring.hopeful_set().sorted(), vec![4]);
        let e = step_selective(&mut ring, &mut rng(3), 1).unwrap();
        assert_eq!((e.node, e.new_color), (4, Color::Green));
        assert!(!ring.node_status(4).is_unhappy());
    }

    #[test]
    fn selective_flips_leave_node_happy() {
        let s = scen(0.5, "0.6", "0.7");
        let mut ring = Ring::random(300, 5, &s, 8).unwrap();
        let mut r = rng(2);
        for t in 1..500 {
            let Some(e) = step_selective(&mut ring, &mut r, t) else { break };
            assert!(!ring.node_status(e.node).is_unhappy());
        }
    }

    #[test]
    fn perturbed_rejects_bad_epsilon() {
        let s = scen(0.5, "0.3", "0.3");
        let mut ring = Ring::uniform(20, 2, Color::Green, &s).unwrap();
        assert!(step_perturbed(&mut ring, 1.0, &mut rng(1), 1).is_err());
        assert!(step_perturbed(&mut ring, 0.0, &mut rng(1), 1).is_err());
    }

    #[test]
    fn perturbed_error_branch_flips_one_node() {
        let s = scen(0.5, "0.3", "0.3");
        let mut r = rng(5);
        let mut ring = Ring::uniform(20, 2, Color::Green, &s).unwrap();
        loop {
            let step = step_perturbed(&mut ring, 0.5, &mut r, 1).unwrap();
            if step.forced {
                assert_eq!(ring.green_total(), 19);
                assert_eq!(step.event.unwrap().new_color, Color::Red);
                break;
            }
            assert!(step.event.is_none());
        }
    }

    #[test]
    fn zero_unhappy_run_finishes_immediately() {
        let s = scen(0.5, "0.3", "0.3");
        let mut ring = Ring::uniform(50, 3, Color::Red, &s).unwrap();
        for d in [Dynamic::Selective, Dynamic::Incremental, Dynamic::Synchronous] {
            let rec = run(&mut ring, &RunConfig::new(d, 100, 1)).unwrap();
            assert_eq!(rec.termination, Termination::Finished);
            assert!(rec.events.is_empty());
            assert_eq!(rec.steps_executed, 0);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let s = scen(0.45, "0.42", "0.47");
        for d in [Dynamic::Selective, Dynamic::Incremental, Dynamic::Synchronous, Dynamic::perturbed(0.01).unwrap()] {
            let cfg = RunConfig::new(d, 5_000, 77);
            let mut a = Ring::random(2_000, 6, &s, 77).unwrap();
            let mut b = Ring::random(2_000, 6, &s, 77).unwrap();
            assert_eq!(run(&mut a, &cfg).unwrap(), run(&mut b, &cfg).unwrap());
        }
    }

    #[test]
    fn perturbed_runs_to_cap() {
        let s = scen(0.5, "0.3", "0.3");
        let mut ring = Ring::uniform(50, 3, Color::Green, &s).unwrap();
        let rec = run(&mut ring, &RunConfig::new(Dynamic::perturbed(0.1).unwrap(), 1_000, 3)).unwrap();
        assert_eq!(rec.termination, Termination::StepCapReached);
        assert_eq!(rec.steps_executed, 1_000);
        assert!(rec.forced_flips > 0);
    }

    #[test]
    fn monitor_is_selective_only() {
        let s = scen(0.5, "0.4", "0.4");
        let mut ring = Ring::random(100, 3, &s, 1).unwrap();
        let cfg = RunConfig::new(Dynamic::Incremental, 100, 1).with_monitor();
        assert_eq!(run(&mut ring, &cfg).unwrap_err(), RunError::MonitorUnsupported);
        let cfg = RunConfig::new(Dynamic::Selective, 0, 1);
        assert_eq!(run(&mut ring, &cfg).unwrap_err(), RunError::ZeroSteps);
    }

    #[test]
    fn monitored_selective_run_finishes() {
        let s = scen(0.5, "0.55", "0.6");
        let mut ring = Ring::random(3_000, 20, &s, 12).unwrap();
        let rec = run(&mut ring, &RunConfig::new(Dynamic::Selective, 1_000_000, 12).with_monitor()).unwrap();
        assert_eq!(rec.termination, Termination::Finished);
        assert!(ring.hopeful_set().is_empty());
    }

    #[test]
    fn changed_count_matches_events() {
        let s = scen(0.5, "0.45", "0.45");
        let mut ring = Ring::random(1_000, 4, &s, 3).unwrap();
        let rec = run(&mut ring, &RunConfig::new(Dynamic::Incremental, 100_000, 3)).unwrap();
        let mut distinct: Vec<usize> = rec.events.iter().map(|e| e.node).collect();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct.len(), rec.changed_node_count);
        assert_eq!(rec.final_green_count, ring.green_total());
        assert!(rec.events.windows(2).all(|p| p[0].time <= p[1].time));
    }
}
