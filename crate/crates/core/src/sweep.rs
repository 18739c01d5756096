//! Monte-Carlo sweeps over the tolerance square for a fixed density, with
//! empirical outcome labels compared against the predicted ones.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{default_max_steps, run, Dynamic, RunConfig, Termination};
use crate::numerics::{bisect, ln_h};
use crate::ring::Ring;
use crate::rng::mix64;
use crate::structure::{run_statistics, RunSummary};
use crate::thresholds::{classify_with, Prediction, ThresholdError, ThresholdSet};
use crate::tolerance::{Scenario, Tolerance};

pub const DEFAULT_DELTA: f64 = 0.05;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for SweepError {
    fn from(e: csv::Error) -> Self {
        SweepError::Csv(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    GreenTotal,
    RedTotal,
    GreenAE,
    RedAE,
    Static,
    Unfinished,
    Mixed,
}

impl Outcome {
    /// In precedence order.
    pub const ALL: [Outcome; 7] = [
        Outcome::GreenTotal,
        Outcome::RedTotal,
        Outcome::GreenAE,
        Outcome::RedAE,
        Outcome::Static,
        Outcome::Unfinished,
        Outcome::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Outcome::GreenTotal => "green-total",
            Outcome::RedTotal => "red-total",
            Outcome::GreenAE => "green-ae",
            Outcome::RedAE => "red-ae",
            Outcome::Static => "static",
            Outcome::Unfinished => "unfinished",
            Outcome::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Outcome::ALL.into_iter().find(|o| o.name() == s).ok_or_else(|| format!("unknown outcome {s:?}"))
    }
}

/// Empirical label of one run. Precedence: total takeover, takeover within
/// `delta`, at most a `delta` fraction changed, unfinished, mixed.
pub fn label_outcome(summary: &RunSummary, delta: f64) -> Outcome {
    let g = summary.final_green_fraction;
    if g >= 1.0 {
        Outcome::GreenTotal
    } else if g <= 0.0 {
        Outcome::RedTotal
    } else if g >= 1.0 - delta {
        Outcome::GreenAE
    } else if g <= delta {
        Outcome::RedAE
    } else if summary.changed_fraction <= delta {
        Outcome::Static
    } else if summary.termination != Termination::Finished {
        Outcome::Unfinished
    } else {
        Outcome::Mixed
    }
}

/// Whether an observed label agrees with a decided prediction. Total and
/// almost-everywhere takeovers of the same colour count as agreeing.
pub fn compatible(prediction: Prediction, outcome: Outcome) -> bool {
    use Outcome as O;
    use Prediction as P;
    match prediction {
        P::GreenTotal | P::GreenTakeoverAE => matches!(outcome, O::GreenTotal | O::GreenAE),
        P::RedTotal | P::RedTakeoverAE => matches!(outcome, O::RedTotal | O::RedAE),
        P::StaticAE => outcome == O::Static,
        _ => false,
    }
}

/// Seed of replicate `rep` in cell `(i, j)`: a bijective mix of the packed
/// indices, so distinct cells and replicates never share a seed.
pub fn seed_for_cell(base_seed: u64, i: usize, j: usize, rep: usize) -> u64 {
    assert!(i < 1 << 20 && j < 1 << 20 && rep < 1 << 24, "sweep index out of range");
    let packed = ((i as u64) << 44) | ((j as u64) << 24) | rep as u64;
    mix64(packed ^ mix64(base_seed ^ 0x5bd1_e995_5bd1_e995))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub rho: f64,
    pub w: usize,
    pub n: usize,
    pub dynamic: Dynamic,
    /// Cells per axis.
    pub resolution: usize,
    pub replicates: usize,
    pub base_seed: u64,
    /// Defaults to 50 n.
    pub max_steps: Option<u64>,
    pub delta: f64,
    /// Worker threads; `None` uses all cores.
    pub threads: Option<usize>,
    /// Range of `tau_r` (horizontal axis). Cell centres sit at
    /// `lo + (2i + 1)(hi - lo) / (2 resolution)`.
    pub tau_r_range: (Ratio<u64>, Ratio<u64>),
    /// Range of `tau_g` (vertical axis).
    pub tau_g_range: (Ratio<u64>, Ratio<u64>),
}

impl SweepConfig {
    /// A sweep over the whole unit square.
    pub fn new(rho: f64, w: usize, n: usize, dynamic: Dynamic, resolution: usize, replicates: usize, base_seed: u64) -> Self {
        let unit = (Ratio::from_integer(0), Ratio::from_integer(1));
        SweepConfig {
            rho,
            w,
            n,
            dynamic,
            resolution,
            replicates,
            base_seed,
            max_steps: None,
            delta: DEFAULT_DELTA,
            threads: None,
            tau_r_range: unit,
            tau_g_range: unit,
        }
    }

    /// A single cell at the given tolerances.
    pub fn point(rho: f64, tau_g: Tolerance, tau_r: Tolerance, w: usize, n: usize, dynamic: Dynamic, replicates: usize, base_seed: u64) -> Self {
        let mut c = SweepConfig::new(rho, w, n, dynamic, 1, replicates, base_seed);
        c.tau_r_range = (tau_r.ratio(), tau_r.ratio());
        c.tau_g_range = (tau_g.ratio(), tau_g.ratio());
        c
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps.unwrap_or_else(|| default_max_steps(self.n))
    }

    fn centre(&self, (lo, hi): (Ratio<u64>, Ratio<u64>), k: usize) -> Result<Tolerance, SweepError> {
        let t = lo + (hi - lo) * Ratio::new(2 * k as u64 + 1, 2 * self.resolution as u64);
        Tolerance::new(*t.numer(), *t.denom()).map_err(|e| SweepError::Config(e.to_string()))
    }

    pub fn tau_r(&self, i: usize) -> Result<Tolerance, SweepError> {
        self.centre(self.tau_r_range, i)
    }

    pub fn tau_g(&self, j: usize) -> Result<Tolerance, SweepError> {
        self.centre(self.tau_g_range, j)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: &str| Err(SweepError::Config(m.to_string()));
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho must lie in (0, 1)");
        }
        if self.resolution == 0 || self.resolution >= 1 << 20 {
            return bad("grid resolution must lie in 1..2^20");
        }
        if self.replicates == 0 || self.replicates >= 1 << 24 {
            return bad("replicates must lie in 1..2^24");
        }
        if self.w == 0 || 2 * self.w + 1 > self.n {
            return bad("need w >= 1 and 2w + 1 <= n");
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return bad("delta must lie in (0, 1/2)");
        }
        if self.threads == Some(0) {
            return bad("threads must be positive");
        }
        for (lo, hi) in [self.tau_r_range, self.tau_g_range] {
            if lo > hi || hi > Ratio::from_integer(1) {
                return bad("tolerance ranges must satisfy 0 <= lo <= hi <= 1");
            }
        }
        for k in [0, self.resolution - 1] {
            self.tau_r(k)?;
            self.tau_g(k)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub rep: usize,
    pub seed: u64,
    /// The summary and label, or the reason the run failed.
    pub result: Result<(RunSummary, Outcome), String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    /// Column index (`tau_r`).
    pub i: usize,
    /// Row index (`tau_g`).
    pub j: usize,
    pub tau_g: Tolerance,
    pub tau_r: Tolerance,
    pub replicates: Vec<Replicate>,
    pub predicted: Prediction,
}

impl CellResult {
    fn ok(&self) -> impl Iterator<Item = &(RunSummary, Outcome)> {
        self.replicates.iter().filter_map(|r| r.result.as_ref().ok())
    }

    /// Most frequent label, ties going to the earlier label in precedence
    /// order.
    pub fn majority(&self) -> Option<Outcome> {
        majority(self.ok().map(|(_, o)| *o))
    }

    fn mean(&self, f: impl Fn(&RunSummary) -> f64) -> f64 {
        let (s, k) = self.ok().fold((0.0, 0usize), |(s, k), (r, _)| (s + f(r), k + 1));
        if k == 0 {
            f64::NAN
        } else {
            s / k as f64
        }
    }

    pub fn mean_final_green(&self) -> f64 {
        self.mean(|r| r.final_green_fraction)
    }

    pub fn mean_changed(&self) -> f64 {
        self.mean(|r| r.changed_fraction)
    }

    pub fn mean_steps(&self) -> f64 {
        self.mean(|r| r.steps as f64)
    }
}

pub fn majority(labels: impl IntoIterator<Item = Outcome>) -> Option<Outcome> {
    let mut counts: BTreeMap<Outcome, usize> = BTreeMap::new();
    for o in labels {
        *counts.entry(o).or_default() += 1;
    }
    // BTreeMap iterates in precedence order, so max_by_key's last-wins rule
    // needs the reversed iterator
    counts.into_iter().rev().max_by_key(|&(_, c)| c).map(|(o, _)| o)
}

/// Threshold lines and the domination boundary drawn over a landscape.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlays {
    /// Lines `tau_r = value`.
    pub verticals: Vec<(&'static str, f64)>,
    /// Lines `tau_g = value`.
    pub horizontals: Vec<(&'static str, f64)>,
    /// Polylines of `(tau_r, tau_g)` points on which
    /// `h(tau_g, tau_r) = (1 - rho) / rho`.
    pub domination: Vec<Vec<(f64, f64)>>,
}

const TRACE_STEPS: usize = 400;

/// Traces the domination boundary by bisection in `tau_g` along vertical
/// lines, separately in the two squares where both tolerances lie on the
/// same side of 1/2.
pub fn trace_domination_boundary(rho: f64) -> Vec<Vec<(f64, f64)>> {
    let target = (-rho).ln_1p() - rho.ln();
    let gap = |g: f64, r: f64| ln_h(g, r).ln - target;
    let mut lines = Vec::new();
    for (lo, hi) in [(0.0, 0.5), (0.5, 1.0)] {
        let step = (hi - lo) / TRACE_STEPS as f64;
        let mut current: Vec<(f64, f64)> = Vec::new();
        for a in 0..TRACE_STEPS {
            let r = lo + (a as f64 + 0.5) * step;
            let mut root = None;
            let mut prev = (lo + 0.5 * step, gap(lo + 0.5 * step, r));
            for b in 1..TRACE_STEPS {
                let g = lo + (b as f64 + 0.5) * step;
                let v = gap(g, r);
                if prev.1.is_finite() && v.is_finite() && (prev.1 < 0.0) != (v < 0.0) {
                    root = bisect(|g| gap(g, r), prev.0, g, 1e-10).ok();
                    break;
                }
                prev = (g, v);
            }
            match root {
                Some(g) => current.push((r, g)),
                None if !current.is_empty() => lines.push(std::mem::take(&mut current)),
                None => {}
            }
        }
        if !current.is_empty() {
            lines.push(current);
        }
    }
    lines
}

pub fn overlays(th: &ThresholdSet) -> Overlays {
    let rho = th.rho;
    Overlays {
        verticals: vec![
            ("kappa_r", th.kappa_r),
            ("1/2", 0.5),
            ("mu_r", th.mu_r),
            ("1-rho/2", 1.0 - 0.5 * rho),
            ("(1-rho)/2", 0.5 * (1.0 - rho)),
        ],
        horizontals: vec![
            ("rho/2", 0.5 * rho),
            ("kappa_g", th.kappa_g),
            ("1/2", 0.5),
            ("mu_g", th.mu_g),
            ("(1+rho)/2", 0.5 * (1.0 + rho)),
        ],
        domination: trace_domination_boundary(rho),
    }
}

impl Overlays {
    /// Distance from `(tau_r, tau_g)` to the nearest overlay line or
    /// boundary vertex.
    pub fn distance(&self, tau_r: f64, tau_g: f64) -> f64 {
        let lines = self
            .verticals
            .iter()
            .map(|&(_, v)| (tau_r - v).abs())
            .chain(self.horizontals.iter().map(|&(_, v)| (tau_g - v).abs()));
        let curve = self.domination.iter().flatten().map(|&(r, g)| (r - tau_r).hypot(g - tau_g));
        lines.chain(curve).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub config: SweepConfig,
    pub thresholds: ThresholdSet,
    /// Row-major in `j` (rows of `tau_g`), then `i`.
    pub cells: Vec<CellResult>,
    pub overlays: Overlays,
}

fn run_one(config: &SweepConfig, scenario: &Scenario, seed: u64) -> Result<(RunSummary, Outcome), String> {
    let mut ring = Ring::random(config.n, config.w, scenario, seed).map_err(|e| e.to_string())?;
    let rc = RunConfig::new(config.dynamic, config.max_steps(), seed).summary_only();
    let record = run(&mut ring, &rc).map_err(|e| e.to_string())?;
    let summary = run_statistics(&record);
    Ok((summary, label_outcome(&summary, config.delta)))
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepGrid, SweepError> {
    config.validate()?;
    let thresholds = ThresholdSet::new(config.rho)?;
    let res = config.resolution;
    let mut cells = Vec::with_capacity(res * res);
    for j in 0..res {
        for i in 0..res {
            let (tau_g, tau_r) = (config.tau_g(j)?, config.tau_r(i)?);
            let scenario = Scenario::new(config.rho, tau_g, tau_r).map_err(|e| SweepError::Config(e.to_string()))?;
            let predicted = classify_with(&scenario, config.dynamic, &thresholds).prediction;
            cells.push(CellResult { i, j, tau_g, tau_r, replicates: Vec::new(), predicted });
        }
    }
    let work: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..config.replicates).map(move |r| (c, r))).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| SweepError::Pool(e.to_string()))?;
    let results: Vec<Replicate> = pool.install(|| {
        work.par_iter()
            .map(|&(c, rep)| {
                let cell = &cells[c];
                let seed = seed_for_cell(config.base_seed, cell.i, cell.j, rep);
                let scenario = Scenario::new(config.rho, cell.tau_g, cell.tau_r).expect("validated");
                Replicate { rep, seed, result: run_one(config, &scenario, seed) }
            })
            .collect()
    });
    for ((c, _), r) in work.into_iter().zip(results) {
        cells[c].replicates.push(r);
    }
    Ok(SweepGrid { config: config.clone(), thresholds, cells, overlays: overlays(&thresholds) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disagreement {
    pub tau_g: Tolerance,
    pub tau_r: Tolerance,
    pub predicted: Prediction,
    pub observed: Option<Outcome>,
    /// Distance to the nearest threshold line or domination boundary.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agreement {
    /// Cells with a proven prediction.
    pub decided: usize,
    pub compatible: usize,
    pub disagreements: Vec<Disagreement>,
}

impl Agreement {
    pub fn fraction(&self) -> f64 {
        if self.decided == 0 {
            f64::NAN
        } else {
            self.compatible as f64 / self.decided as f64
        }
    }
}

impl SweepGrid {
    pub fn agreement(&self) -> Agreement {
        let mut out = Agreement { decided: 0, compatible: 0, disagreements: Vec::new() };
        for cell in &self.cells {
            if !cell.predicted.is_decided() {
                continue;
            }
            out.decided += 1;
            let observed = cell.majority();
            if observed.is_some_and(|o| compatible(cell.predicted, o)) {
                out.compatible += 1;
            } else {
                out.disagreements.push(Disagreement {
                    tau_g: cell.tau_g,
                    tau_r: cell.tau_r,
                    predicted: cell.predicted,
                    observed,
                    distance: self.overlays.distance(cell.tau_r.to_f64(), cell.tau_g.to_f64()),
                });
            }
        }
        out
    }

    fn metadata(&self) -> Vec<(&'static str, String)> {
        let c = &self.config;
        vec![
            ("rho", c.rho.to_string()),
            ("w", c.w.to_string()),
            ("n", c.n.to_string()),
            ("dynamic", c.dynamic.to_string()),
            ("resolution", c.resolution.to_string()),
            ("replicates", c.replicates.to_string()),
            ("base_seed", c.base_seed.to_string()),
            ("max_steps", c.max_steps().to_string()),
            ("delta", c.delta.to_string()),
        ]
    }

    /// One row per cell and replicate after `# key=value` metadata lines.
    /// Failed replicates carry `error:<reason>` in the termination column.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), SweepError> {
        let io = |e: std::io::Error| SweepError::Csv(e.to_string());
        for (k, v) in self.metadata() {
            writeln!(out, "# {k}={v}").map_err(io)?;
        }
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(CSV_COLUMNS)?;
        for cell in &self.cells {
            for r in &cell.replicates {
                let (tr, tg) = (cell.tau_r.to_string(), cell.tau_g.to_string());
                let (rep, seed) = (r.rep.to_string(), r.seed.to_string());
                let row: [String; 10] = match &r.result {
                    Ok((s, o)) => [
                        tr,
                        tg,
                        rep,
                        seed,
                        o.to_string(),
                        format!("{:.6}", s.final_green_fraction),
                        format!("{:.6}", s.changed_fraction),
                        s.steps.to_string(),
                        s.termination.to_string(),
                        cell.predicted.to_string(),
                    ],
                    Err(e) => [tr, tg, rep, seed, String::new(), String::new(), String::new(), String::new(), format!("error:{e}"), cell.predicted.to_string()],
                };
                wtr.write_record(&row)?;
            }
        }
        wtr.flush().map_err(io)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    /// Per-label counts of cell majorities and the agreement figures.
    pub fn summary_text(&self) -> String {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for c in &self.cells {
            let key = c.majority().map_or("none".to_string(), |o| o.to_string());
            *counts.entry(key).or_default() += 1;
        }
        let a = self.agreement();
        let mut s = String::new();
        for (k, v) in self.metadata() {
            s.push_str(&format!("{k}: {v}\n"));
        }
        s.push_str(&format!(
            "kappa_g: {:.9}\nkappa_r: {:.9}\nmu_g: {:.9}\nmu_r: {:.9}\n",
            self.thresholds.kappa_g, self.thresholds.kappa_r, self.thresholds.mu_g, self.thresholds.mu_r
        ));
        s.push_str("majority labels:\n");
        for (k, v) in counts {
            s.push_str(&format!("  {k}: {v}\n"));
        }
        s.push_str(&format!("decided cells: {}\ncompatible: {}\nagreement: {:.4}\n", a.decided, a.compatible, a.fraction()));
        if !a.disagreements.is_empty() {
            s.push_str("disagreements (tau_r, tau_g, predicted, observed, distance):\n");
            for d in &a.disagreements {
                let obs = d.observed.map_or("none".to_string(), |o| o.to_string());
                s.push_str(&format!("  {} {} {} {} {:.4}\n", d.tau_r, d.tau_g, d.predicted, obs, d.distance));
            }
        }
        s
    }
}

pub const CSV_COLUMNS: [&str; 10] =
    ["tau_r", "tau_g", "rep", "seed", "outcome", "final_green_frac", "changed_frac", "steps", "termination", "predicted"];

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub tau_r: Tolerance,
    pub tau_g: Tolerance,
    pub rep: usize,
    pub seed: u64,
    /// `None` for a failed replicate.
    pub outcome: Option<Outcome>,
    pub final_green_frac: Option<f64>,
    pub changed_frac: Option<f64>,
    pub steps: Option<u64>,
    pub termination: String,
    pub predicted: Prediction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCsv {
    pub metadata: BTreeMap<String, String>,
    pub rows: Vec<CsvRow>,
}

impl SweepCsv {
    pub fn meta<T: FromStr>(&self, key: &str) -> Result<T, SweepError> {
        self.metadata
            .get(key)
            .ok_or_else(|| SweepError::Csv(format!("missing metadata {key}")))?
            .parse()
            .map_err(|_| SweepError::Csv(format!("bad metadata {key}")))
    }

    /// Majority label per distinct `(tau_r, tau_g)`, in order of first
    /// appearance.
    pub fn cells(&self) -> Vec<(Tolerance, Tolerance, Prediction, Option<Outcome>)> {
        let mut order: Vec<(Tolerance, Tolerance, Prediction)> = Vec::new();
        let mut labels: BTreeMap<(u64, u64, u64, u64), Vec<Outcome>> = BTreeMap::new();
        for r in &self.rows {
            let key = (r.tau_r.numerator(), r.tau_r.denominator(), r.tau_g.numerator(), r.tau_g.denominator());
            let entry = labels.entry(key).or_insert_with(|| {
                order.push((r.tau_r, r.tau_g, r.predicted));
                Vec::new()
            });
            entry.extend(r.outcome);
        }
        order
            .into_iter()
            .map(|(tr, tg, p)| {
                let key = (tr.numerator(), tr.denominator(), tg.numerator(), tg.denominator());
                (tr, tg, p, majority(labels[&key].iter().copied()))
            })
            .collect()
    }
}

pub fn read_csv<R: Read>(mut input: R) -> Result<SweepCsv, SweepError> {
    let mut text = String::new();
    input.read_to_string(&mut text).map_err(|e| SweepError::Csv(e.to_string()))?;
    let mut metadata = BTreeMap::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(m) = line.strip_prefix('#') {
            if let Some((k, v)) = m.trim().split_once('=') {
                metadata.insert(k.trim().to_string(), v.trim().to_string());
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_COLUMNS {
        return Err(SweepError::Csv(format!("unexpected header {headers:?}")));
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| SweepError::Csv(format!("row {}: bad {what}", k + 1));
        let opt = |s: &str| if s.is_empty() { None } else { Some(s.to_string()) };
        rows.push(CsvRow {
            tau_r: rec[0].parse().map_err(|_| bad("tau_r"))?,
            tau_g: rec[1].parse().map_err(|_| bad("tau_g"))?,
            rep: rec[2].parse().map_err(|_| bad("rep"))?,
            seed: rec[3].parse().map_err(|_| bad("seed"))?,
            outcome: opt(&rec[4]).map(|s| s.parse()).transpose().map_err(|_| bad("outcome"))?,
            final_green_frac: opt(&rec[5]).map(|s| s.parse()).transpose().map_err(|_| bad("final_green_frac"))?,
            changed_frac: opt(&rec[6]).map(|s| s.parse()).transpose().map_err(|_| bad("changed_frac"))?,
            steps: opt(&rec[7]).map(|s| s.parse()).transpose().map_err(|_| bad("steps"))?,
            termination: rec[8].to_string(),
            predicted: rec[9].parse().map_err(|_| bad("predicted"))?,
        });
    }
    Ok(SweepCsv { metadata, rows })
}
