//! Ring state: colours, maintained neighbourhood counts and status sets.

use std::fmt;

use num_rational::Ratio;
use rand::Rng;
use thiserror::Error;

use crate::rng::{node_key, rng_for, STREAM_INIT};
use crate::tolerance::{check_probability, Scenario, ToleranceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Color {
    Red = 0,
    Green = 1,
}

impl Color {
    pub fn flipped(self) -> Color {
        match self {
            Color::Red => Color::Green,
            Color::Green => Color::Red,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Green => 'G',
        }
    }

    pub fn from_symbol(c: char) -> Option<Color> {
        match c {
            'R' | 'r' => Some(Color::Red),
            'G' | 'g' => Some(Color::Green),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Red => "red",
            Color::Green => "green",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    Happy,
    UnhappyHopeless,
    /// Unhappy, and would be happy after changing colour.
    Hopeful,
}

impl NodeStatus {
    pub fn is_unhappy(self) -> bool {
        !matches!(self, NodeStatus::Happy)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RingError {
    #[error("neighbourhood radius must be at least 1")]
    ZeroRadius,
    #[error("ring of {n} nodes cannot hold a neighbourhood of 2w+1 = {window} nodes")]
    WindowTooLarge { n: usize, window: usize },
    #[error("ring of {0} nodes exceeds the supported size")]
    TooLarge(usize),
    #[error(transparent)]
    Tolerance(#[from] ToleranceError),
}

/// Integer form of the happiness rule for a fixed window size.
///
/// `need_green` is the least green count that satisfies
/// `den_g * G >= num_g * (2w + 1)`; likewise `need_red` for red counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HappinessRule {
    pub window: u64,
    pub need_green: u64,
    pub need_red: u64,
}

impl HappinessRule {
    pub fn new(scenario: &Scenario, w: usize) -> Self {
        let window = 2 * w as u64 + 1;
        HappinessRule {
            window,
            need_green: scenario.tau_g().min_count(window),
            need_red: scenario.tau_r().min_count(window),
        }
    }

    /// Status of a node of `color` whose neighbourhood (itself included)
    /// holds `greens` green nodes.
    #[inline]
    pub fn status(&self, color: Color, greens: u64) -> NodeStatus {
        let reds = self.window - greens;
        // a hopeful node counts itself in its prospective colour
        let (own, other, need_own, need_other) = match color {
            Color::Green => (greens, reds, self.need_green, self.need_red),
            Color::Red => (reds, greens, self.need_red, self.need_green),
        };
        if own >= need_own {
            NodeStatus::Happy
        } else if other + 1 >= need_other {
            NodeStatus::Hopeful
        } else {
            NodeStatus::UnhappyHopeless
        }
    }
}

/// A set of node indices supporting O(1) insert, remove and uniform sampling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedSet {
    items: Vec<u32>,
    // slot[x] = position of x in `items` plus one, zero when absent
    slot: Vec<u32>,
}

impl IndexedSet {
    pub fn with_capacity(n: usize) -> Self {
        IndexedSet { items: Vec::new(), slot: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.slot[x] != 0
    }

    pub fn insert(&mut self, x: usize) -> bool {
        if self.slot[x] != 0 {
            return false;
        }
        self.items.push(x as u32);
        self.slot[x] = self.items.len() as u32;
        true
    }

    pub fn remove(&mut self, x: usize) -> bool {
        let s = self.slot[x];
        if s == 0 {
            return false;
        }
        let idx = (s - 1) as usize;
        let last = *self.items.last().unwrap();
        self.items.swap_remove(idx);
        if last as usize != x {
            self.slot[last as usize] = s;
        }
        self.slot[x] = 0;
        true
    }

    #[inline]
    fn set(&mut self, x: usize, member: bool) {
        if member {
            self.insert(x);
        } else {
            self.remove(x);
        }
    }

    pub fn get(&self, i: usize) -> usize {
        self.items[i] as usize
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        if self.items.is_empty() {
            None
        } else {
            Some(self.items[rng.gen_range(0..self.items.len())] as usize)
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.items.iter().map(|&x| x as usize)
    }

    /// Members in increasing index order.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.iter().collect();
        v.sort_unstable();
        v
    }

    fn clear(&mut self) {
        for &x in &self.items {
            self.slot[x as usize] = 0;
        }
        self.items.clear();
    }
}

/// Upper bound on ring size; keeps indices in `u32` and counts exact.
pub const MAX_NODES: usize = 100_000_000;

/// A Schelling ring under a fixed scenario.
#[derive(Debug, Clone)]
pub struct Ring {
    w: usize,
    scenario: Scenario,
    rule: HappinessRule,
    seed: Option<u64>,
    colors: Vec<Color>,
    green_counts: Vec<u32>,
    unhappy: IndexedSet,
    hopeful: IndexedSet,
    green_total: usize,
    zobrist: u128,
}

impl Ring {
    /// Colours every node green independently with probability `rho`.
    pub fn random(n: usize, w: usize, scenario: &Scenario, seed: u64) -> Result<Ring, RingError> {
        check_shape(n, w)?;
        let rho = check_probability(scenario.rho())?;
        let mut rng = rng_for(seed, STREAM_INIT);
        let colors = (0..n)
            .map(|_| if rng.gen_bool(rho) { Color::Green } else { Color::Red })
            .collect();
        let mut ring = Ring::from_colors(colors, w, scenario)?;
        ring.seed = Some(seed);
        Ok(ring)
    }

    pub fn from_colors(colors: Vec<Color>, w: usize, scenario: &Scenario) -> Result<Ring, RingError> {
        let n = colors.len();
        check_shape(n, w)?;
        let mut ring = Ring {
            w,
            scenario: *scenario,
            rule: HappinessRule::new(scenario, w),
            seed: None,
            colors,
            green_counts: vec![0; n],
            unhappy: IndexedSet::with_capacity(n),
            hopeful: IndexedSet::with_capacity(n),
            green_total: 0,
            zobrist: 0,
        };
        ring.rebuild();
        Ok(ring)
    }

    pub fn uniform(n: usize, w: usize, color: Color, scenario: &Scenario) -> Result<Ring, RingError> {
        Ring::from_colors(vec![color; n], w, scenario)
    }

    /// Recomputes every derived quantity from the colour array in O(n).
    fn rebuild(&mut self) {
        let n = self.colors.len();
        let w = self.w;
        let g = |c: Color| c as u32;
        let mut count: u32 = (0..=w).map(|k| g(self.colors[k])).sum::<u32>()
            + (1..=w).map(|k| g(self.colors[n - k])).sum::<u32>();
        for x in 0..n {
            self.green_counts[x] = count;
            count += g(self.colors[(x + w + 1) % n]);
            count -= g(self.colors[(x + n - w) % n]);
        }
        self.green_total = self.colors.iter().filter(|&&c| c == Color::Green).count();
        self.zobrist = self
            .colors
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == Color::Green)
            .fold(0, |h, (x, _)| h ^ node_key(x));
        self.unhappy.clear();
        self.hopeful.clear();
        for x in 0..n {
            self.refresh(x);
        }
    }

    #[inline]
    fn refresh(&mut self, x: usize) {
        let status = self.rule.status(self.colors[x], self.green_counts[x] as u64);
        self.unhappy.set(x, status.is_unhappy());
        self.hopeful.set(x, status == NodeStatus::Hopeful);
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn window(&self) -> usize {
        2 * self.w + 1
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn rule(&self) -> &HappinessRule {
        &self.rule
    }

    /// Seed the ring was drawn from, if it was drawn at random.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn set_seed(&mut self, seed: Option<u64>) {
        self.seed = seed;
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn color(&self, x: usize) -> Color {
        self.colors[x]
    }

    /// `G(N(x))`.
    pub fn green_count(&self, x: usize) -> usize {
        self.green_counts[x] as usize
    }

    pub fn green_counts(&self) -> &[u32] {
        &self.green_counts
    }

    pub fn green_total(&self) -> usize {
        self.green_total
    }

    pub fn unhappy_set(&self) -> &IndexedSet {
        &self.unhappy
    }

    pub fn hopeful_set(&self) -> &IndexedSet {
        &self.hopeful
    }

    /// Order-independent 128-bit hash of the colouring.
    pub fn state_hash(&self) -> u128 {
        self.zobrist
    }

    pub fn node_status(&self, x: usize) -> NodeStatus {
        self.rule.status(self.colors[x], self.green_counts[x] as u64)
    }

    /// `G(N(x)) / (2w + 1)`.
    pub fn local_green_density(&self, x: usize) -> Ratio<u64> {
        Ratio::new(self.green_counts[x] as u64, self.window() as u64)
    }

    /// Address `x + offset` reduced mod n.
    pub fn offset(&self, x: usize, offset: isize) -> usize {
        let n = self.n() as isize;
        (x as isize + offset).rem_euclid(n) as usize
    }

    /// Toggles the colour of `x`, updating the `2w + 1` affected counts and
    /// statuses.
    pub fn flip(&mut self, x: usize) {
        let n = self.n();
        let w = self.w;
        let now = self.colors[x].flipped();
        self.colors[x] = now;
        self.zobrist ^= node_key(x);
        let inc = now == Color::Green;
        if inc {
            self.green_total += 1;
        } else {
            self.green_total -= 1;
        }
        let start = (x + n - w) % n;
        let window = 2 * w + 1;
        let first = window.min(n - start);
        for y in (start..start + first).chain(0..window - first) {
            if inc {
                self.green_counts[y] += 1;
            } else {
                self.green_counts[y] -= 1;
            }
            self.refresh(y);
        }
    }

    /// Flips a batch of distinct nodes as one simultaneous update. Large
    /// batches are applied with a single O(n) rebuild.
    pub fn flip_many(&mut self, nodes: &[usize]) {
        if nodes.len().saturating_mul(self.window()) > 2 * self.n() {
            for &x in nodes {
                self.colors[x] = self.colors[x].flipped();
            }
            self.rebuild();
        } else {
            for &x in nodes {
                self.flip(x);
            }
        }
    }

    /// Every maintained quantity is recomputed from scratch and compared.
    /// Returns a description of the first mismatch.
    pub fn audit(&self) -> Result<(), String> {
        let n = self.n();
        for x in 0..n {
            let brute = (0..self.window())
                .filter(|&k| self.colors[self.offset(x, k as isize - self.w as isize)] == Color::Green)
                .count();
            if brute != self.green_counts[x] as usize {
                return Err(format!("green count at {x}: maintained {} brute {brute}", self.green_counts[x]));
            }
            let status = self.node_status(x);
            if self.unhappy.contains(x) != status.is_unhappy() {
                return Err(format!("unhappy membership of {x} disagrees with {status:?}"));
            }
            if self.hopeful.contains(x) != (status == NodeStatus::Hopeful) {
                return Err(format!("hopeful membership of {x} disagrees with {status:?}"));
            }
            if self.hopeful.contains(x) && !self.unhappy.contains(x) {
                return Err(format!("{x} hopeful but not unhappy"));
            }
        }
        let greens = self.colors.iter().filter(|&&c| c == Color::Green).count();
        if greens != self.green_total {
            return Err(format!("green total {} vs {greens}", self.green_total));
        }
        Ok(())
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.w == other.w && self.scenario == other.scenario && self.colors == other.colors
    }
}

fn check_shape(n: usize, w: usize) -> Result<(), RingError> {
    if w == 0 {
        return Err(RingError::ZeroRadius);
    }
    let window = 2 * w + 1;
    if n < window {
        return Err(RingError::WindowTooLarge { n, window });
    }
    if n > MAX_NODES {
        return Err(RingError::TooLarge(n));
    }
    Ok(())
}
