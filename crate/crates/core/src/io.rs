//! Plain-text serialisation of rings and run records.
//!
//! Both formats are line based. A header of `key=value` lines follows a magic
//! line, then colour sections hold run-length encoded colours (`12G3R...`,
//! wrapped at 72 characters).
//!
//! Ring file:
//!
//! ```text
//! schelling-ring 1
//! n=10
//! w=2
//! seed=7
//! rho=0.5
//! tau_g=0.4
//! tau_r=0.4
//! colors
//! 3G2R5G
//! end
//! ```
//!
//! Run file: header keys `n w seed rho tau_g tau_r dynamic steps termination
//! initial_green final_green changed forced events_recorded`, then optional
//! `initial` and `final` colour sections, then an optional `events` section
//! with one `time node colour` triple per line, each section closed by `end`.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::dynamics::{ChangeEvent, Dynamic, RunRecord, Termination};
use crate::ring::{Color, Ring, RingError};
use crate::tolerance::{parse_tolerance, Scenario};

const RING_MAGIC: &str = "schelling-ring 1";
const RUN_MAGIC: &str = "schelling-run 1";
const LINE_WIDTH: usize = 72;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing header key {0:?}")]
    MissingKey(&'static str),
    #[error(transparent)]
    Ring(#[from] RingError),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line: line + 1, message: message.into() }
}

/// Run-length encodes colours as `<count><G|R>` tokens.
pub fn encode_colors(colors: &[Color]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < colors.len() {
        let c = colors[i];
        let mut j = i;
        while j < colors.len() && colors[j] == c {
            j += 1;
        }
        let _ = write!(out, "{}{}", j - i, c.symbol());
        i = j;
    }
    out
}

pub fn decode_colors(text: &str) -> Result<Vec<Color>, String> {
    let mut out = Vec::new();
    let mut count: u64 = 0;
    let mut have_digits = false;
    for ch in text.chars().filter(|c| !c.is_whitespace()) {
        if let Some(d) = ch.to_digit(10) {
            count = count.checked_mul(10).and_then(|c| c.checked_add(d as u64)).ok_or("run length overflow")?;
            have_digits = true;
        } else if let Some(c) = Color::from_symbol(ch) {
            if !have_digits || count == 0 {
                return Err(format!("colour {ch} without a positive run length"));
            }
            if out.len() as u64 + count > crate::ring::MAX_NODES as u64 {
                return Err("ring too large".into());
            }
            out.extend(std::iter::repeat(c).take(count as usize));
            count = 0;
            have_digits = false;
        } else {
            return Err(format!("unexpected character {ch:?}"));
        }
    }
    if have_digits {
        return Err("trailing run length without colour".into());
    }
    Ok(out)
}

fn push_wrapped(out: &mut String, body: &str) {
    if body.is_empty() {
        out.push('\n');
    }
    let mut line_len = 0;
    // break only between tokens so each line decodes on its own
    let mut token = String::new();
    for ch in body.chars() {
        token.push(ch);
        if ch.is_ascii_alphabetic() {
            if line_len > 0 && line_len + token.len() > LINE_WIDTH {
                out.push('\n');
                line_len = 0;
            }
            out.push_str(&token);
            line_len += token.len();
            token.clear();
        }
    }
    if line_len > 0 {
        out.push('\n');
    }
}

fn push_section(out: &mut String, name: &str, colors: &[Color]) {
    out.push_str(name);
    out.push('\n');
    push_wrapped(out, &encode_colors(colors));
    out.push_str("end\n");
}

fn push_scenario(out: &mut String, n: usize, w: usize, seed: Option<u64>, s: &Scenario) {
    let _ = writeln!(out, "n={n}");
    let _ = writeln!(out, "w={w}");
    match seed {
        Some(seed) => {
            let _ = writeln!(out, "seed={seed}");
        }
        None => out.push_str("seed=none\n"),
    }
    let _ = writeln!(out, "rho={}", s.rho());
    let _ = writeln!(out, "tau_g={}", s.tau_g());
    let _ = writeln!(out, "tau_r={}", s.tau_r());
}

pub fn write_ring(ring: &Ring) -> String {
    let mut out = String::from(RING_MAGIC);
    out.push('\n');
    push_scenario(&mut out, ring.n(), ring.w(), ring.seed(), ring.scenario());
    push_section(&mut out, "colors", ring.colors());
    out
}

pub fn write_run(record: &RunRecord) -> String {
    let mut out = String::from(RUN_MAGIC);
    out.push('\n');
    push_scenario(&mut out, record.n, record.w, Some(record.seed), &record.scenario);
    let _ = writeln!(out, "dynamic={}", record.dynamic);
    let _ = writeln!(out, "steps={}", record.steps_executed);
    let _ = writeln!(out, "termination={}", record.termination);
    let _ = writeln!(out, "initial_green={}", record.initial_green_count);
    let _ = writeln!(out, "final_green={}", record.final_green_count);
    let _ = writeln!(out, "changed={}", record.changed_node_count);
    let _ = writeln!(out, "forced={}", record.forced_flips);
    let _ = writeln!(out, "events_recorded={}", record.events_recorded);
    if let Some(c) = &record.initial_colors {
        push_section(&mut out, "initial", c);
    }
    if let Some(c) = &record.final_colors {
        push_section(&mut out, "final", c);
    }
    if record.events_recorded {
        out.push_str("events\n");
        for e in &record.events {
            let _ = writeln!(out, "{} {} {}", e.time, e.node, e.new_color.symbol());
        }
        out.push_str("end\n");
    }
    out
}

struct Parsed {
    header: HashMap<String, (usize, String)>,
    sections: HashMap<String, (usize, Vec<String>)>,
}

impl Parsed {
    fn get(&self, key: &'static str) -> Result<(usize, &str), FormatError> {
        self.header.get(key).map(|(l, v)| (*l, v.as_str())).ok_or(FormatError::MissingKey(key))
    }

    fn num<T: std::str::FromStr>(&self, key: &'static str) -> Result<T, FormatError> {
        let (line, v) = self.get(key)?;
        v.parse().map_err(|_| parse_err(line, format!("bad value for {key}: {v:?}")))
    }

    fn scenario(&self) -> Result<Scenario, FormatError> {
        let rho: f64 = self.num("rho")?;
        let (lg, g) = self.get("tau_g")?;
        let (lr, r) = self.get("tau_r")?;
        let g = parse_tolerance(g).map_err(|e| parse_err(lg, e.to_string()))?;
        let r = parse_tolerance(r).map_err(|e| parse_err(lr, e.to_string()))?;
        Scenario::new(rho, g, r).map_err(|e| parse_err(self.get("rho").unwrap().0, e.to_string()))
    }

    fn colors(&self, name: &str) -> Result<Option<Vec<Color>>, FormatError> {
        match self.sections.get(name) {
            None => Ok(None),
            Some((line, body)) => decode_colors(&body.join("")).map(Some).map_err(|e| parse_err(*line, e)),
        }
    }
}

fn parse(text: &str, magic: &str) -> Result<Parsed, FormatError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == magic => {}
        _ => return Err(parse_err(0, format!("expected {magic:?}"))),
    }
    let mut header = HashMap::new();
    let mut sections = HashMap::new();
    while let Some((i, raw)) = lines.next() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((k, v)) = line.split_once('=') {
            header.insert(k.trim().to_string(), (i, v.trim().to_string()));
            continue;
        }
        let name = line.to_string();
        let mut body = Vec::new();
        loop {
            match lines.next() {
                Some((_, l)) if l.trim() == "end" => break,
                Some((_, l)) => body.push(l.trim().to_string()),
                None => return Err(parse_err(i, format!("section {name} is not closed"))),
            }
        }
        if sections.insert(name.clone(), (i, body)).is_some() {
            return Err(parse_err(i, format!("duplicate section {name}")));
        }
    }
    Ok(Parsed { header, sections })
}

pub fn read_ring(text: &str) -> Result<Ring, FormatError> {
    let p = parse(text, RING_MAGIC)?;
    let n: usize = p.num("n")?;
    let w: usize = p.num("w")?;
    let seed = match p.get("seed")? {
        (_, "none") => None,
        _ => Some(p.num::<u64>("seed")?),
    };
    let scenario = p.scenario()?;
    let colors = p.colors("colors")?.ok_or_else(|| parse_err(0, "missing colors section"))?;
    if colors.len() != n {
        return Err(parse_err(0, format!("header says n={n} but {} colours given", colors.len())));
    }
    let mut ring = Ring::from_colors(colors, w, &scenario)?;
    ring.set_seed(seed);
    Ok(ring)
}

pub fn read_run(text: &str) -> Result<RunRecord, FormatError> {
    let p = parse(text, RUN_MAGIC)?;
    let n: usize = p.num("n")?;
    let scenario = p.scenario()?;
    let (ld, d) = p.get("dynamic")?;
    let dynamic: Dynamic = d.parse().map_err(|e: crate::dynamics::DynamicError| parse_err(ld, e.to_string()))?;
    let (lt, t) = p.get("termination")?;
    let termination: Termination = t.parse().map_err(|e: String| parse_err(lt, e))?;
    let initial_colors = p.colors("initial")?;
    let final_colors = p.colors("final")?;
    for (c, name) in [(&initial_colors, "initial"), (&final_colors, "final")] {
        if c.as_ref().is_some_and(|c| c.len() != n) {
            return Err(parse_err(0, format!("{name} section length differs from n={n}")));
        }
    }
    let events_recorded: bool = p.num("events_recorded")?;
    let mut events = Vec::new();
    if let Some((start, body)) = p.sections.get("events") {
        for (k, line) in body.iter().enumerate() {
            let at = start + k + 1;
            let mut parts = line.split_whitespace();
            let (Some(t), Some(x), Some(c), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                return Err(parse_err(at, "expected `time node colour`"));
            };
            let time = t.parse().map_err(|_| parse_err(at, "bad time"))?;
            let node: usize = x.parse().map_err(|_| parse_err(at, "bad node"))?;
            if node >= n {
                return Err(parse_err(at, format!("node {node} out of range")));
            }
            let new_color = match c.chars().collect::<Vec<_>>()[..] {
                [ch] => Color::from_symbol(ch).ok_or_else(|| parse_err(at, "bad colour"))?,
                _ => return Err(parse_err(at, "bad colour")),
            };
            events.push(ChangeEvent { time, node, new_color });
        }
    }
    Ok(RunRecord {
        scenario,
        n,
        w: p.num("w")?,
        seed: p.num("seed")?,
        dynamic,
        events,
        events_recorded,
        steps_executed: p.num("steps")?,
        termination,
        initial_green_count: p.num("initial_green")?,
        final_green_count: p.num("final_green")?,
        changed_node_count: p.num("changed")?,
        initial_colors,
        final_colors,
        forced_flips: p.num("forced")?,
    })
}
