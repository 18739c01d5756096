//! Brute-force oracles written directly from the definitions, sharing no
//! code with the library's sliding-window implementations.
#![allow(dead_code)]

use num_rational::Ratio;
use schelling_core::{Color, NodeStatus, Tolerance};

pub fn colors_from_bits(bits: u64, n: usize) -> Vec<Color> {
    (0..n).map(|k| if bits >> k & 1 == 1 { Color::Green } else { Color::Red }).collect()
}

fn at(colors: &[Color], x: i64) -> Color {
    let n = colors.len() as i64;
    colors[x.rem_euclid(n) as usize]
}

/// Greens in `[x - w, x + w]`, counting a node once per appearance.
pub fn green_count(colors: &[Color], w: usize, x: usize) -> usize {
    let x = x as i64;
    let w = w as i64;
    (x - w..=x + w).filter(|&y| at(colors, y) == Color::Green).count()
}

fn frac(t: Tolerance) -> Ratio<u64> {
    Ratio::new(t.numerator(), t.denominator())
}

fn meets(count: usize, window: usize, tau: Tolerance) -> bool {
    Ratio::new(count as u64, window as u64) >= frac(tau)
}

pub fn status(colors: &[Color], w: usize, x: usize, tau_g: Tolerance, tau_r: Tolerance) -> NodeStatus {
    let window = 2 * w + 1;
    let g = green_count(colors, w, x);
    let (same, other, tau_same, tau_other) = match colors[x] {
        Color::Green => (g, window - g, tau_g, tau_r),
        Color::Red => (window - g, g, tau_r, tau_g),
    };
    if meets(same, window, tau_same) {
        NodeStatus::Happy
    } else if meets(other + 1, window, tau_other) {
        NodeStatus::Hopeful
    } else {
        NodeStatus::UnhappyHopeless
    }
}

fn count_in(colors: &[Color], a: usize, len: usize, c: Color) -> usize {
    (a..a + len).filter(|&y| at(colors, y as i64) == c).count()
}

/// Starts `a` of windows `[a, a + w]` holding at least `tau (2w + 1)` nodes
/// of colour `c`.
pub fn stable_starts(colors: &[Color], w: usize, c: Color, tau: Tolerance) -> Vec<usize> {
    (0..colors.len()).filter(|&a| meets(count_in(colors, a, w + 1, c), 2 * w + 1, tau)).collect()
}

/// Starts of windows `[a, a + w]` in which no node of the other colour can
/// ever be happy as `c`: even with every node outside the window being `c`
/// the count stays below `tau (2w + 1)`.
pub fn intractable_starts(colors: &[Color], w: usize, c: Color, tau: Tolerance) -> Vec<usize> {
    (0..colors.len())
        .filter(|&a| !meets(count_in(colors, a, w + 1, c) + w + 1, 2 * w + 1, tau))
        .collect()
}

/// Maximal runs of `c` with length at least `min_len`, as `(start, length)`
/// sorted by start.
pub fn runs(colors: &[Color], c: Color, min_len: usize) -> Vec<(usize, usize)> {
    let n = colors.len();
    if colors.iter().all(|&x| x == c) {
        return if n >= min_len { vec![(0, n)] } else { vec![] };
    }
    let mut out = Vec::new();
    for s in 0..n {
        if colors[s] == c && at(colors, s as i64 - 1) != c {
            let mut len = 0;
            while at(colors, (s + len) as i64) == c {
                len += 1;
            }
            if len >= min_len {
                out.push((s, len));
            }
        }
    }
    out
}

/// The colouring after one synchronous step.
pub fn synchronous_step(colors: &[Color], w: usize, tau_g: Tolerance, tau_r: Tolerance) -> Vec<Color> {
    (0..colors.len())
        .map(|x| {
            let s = status(colors, w, x, tau_g, tau_r);
            if s == NodeStatus::Happy {
                colors[x]
            } else {
                colors[x].flipped()
            }
        })
        .collect()
}

/// Upper quantile of the chi-square distribution by the Wilson-Hilferty
/// approximation; `z` is the matching standard normal quantile.
pub fn chi_square_quantile(dof: f64, z: f64) -> f64 {
    let a = 2.0 / (9.0 * dof);
    dof * (1.0 - a + z * a.sqrt()).powi(3)
}
