//! SVG output: outcome landscapes and radial ring histories.
//!
//! Palette: green-total `#1a7a36`, green-ae `#8fce72`, red-total `#c0282d`,
//! red-ae `#f4a582`, static `#b8b8b8`, unfinished `#4d4d4d`, mixed hatched.
//! Cells whose prediction is open, borderline or conjectural get a purple
//! inset frame (`#7b3fa0`).

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::dynamics::RunRecord;
use crate::ring::{Color, Ring, RingError};
use crate::structure::replay;
use crate::sweep::{overlays, Outcome, SweepCsv, SweepError};
use crate::thresholds::ThresholdSet;

/// Rings longer than this are drawn by aggregating arcs.
pub const MAX_RING_ARCS: usize = 10_000;
const MAX_EVENT_MARKS: usize = 200_000;

pub const GREEN: &str = "#1a7a36";
pub const RED: &str = "#c0282d";
pub const PURPLE: &str = "#7b3fa0";

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("the record has no event log; rerun with events on")]
    MissingEvents,
    #[error("the record has no initial colouring")]
    MissingInitial,
    #[error("the CSV has no rows")]
    Empty,
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error("replay failed: {0}")]
    Replay(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

pub fn outcome_fill(o: Outcome) -> &'static str {
    match o {
        Outcome::GreenTotal => GREEN,
        Outcome::GreenAE => "#8fce72",
        Outcome::RedTotal => RED,
        Outcome::RedAE => "#f4a582",
        Outcome::Static => "#b8b8b8",
        Outcome::Unfinished => "#4d4d4d",
        Outcome::Mixed => "url(#hatch)",
    }
}

fn color_fill(c: Color) -> &'static str {
    match c {
        Color::Green => GREEN,
        Color::Red => RED,
    }
}

const PLOT: f64 = 600.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;

fn px(tau_r: f64) -> f64 {
    LEFT + tau_r * PLOT
}

fn py(tau_g: f64) -> f64 {
    TOP + (1.0 - tau_g) * PLOT
}

/// Landscape of majority labels with `tau_r` across and `tau_g` up, threshold
/// lines and the domination boundary.
pub fn render_landscape(csv: &SweepCsv) -> Result<String, RenderError> {
    let rho: f64 = csv.meta("rho")?;
    let resolution: usize = csv.meta("resolution")?;
    let cells = csv.cells();
    if cells.is_empty() {
        return Err(RenderError::Empty);
    }
    let th = ThresholdSet::new(rho).map_err(SweepError::from)?;
    let ov = overlays(&th);
    let width = LEFT + PLOT + 260.0;
    let height = TOP + PLOT + 60.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    s.push_str(concat!(
        r#"<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">"#,
        r##"<rect width="6" height="6" fill="#ffffff"/><line x1="0" y1="0" x2="0" y2="6" stroke="#777777" stroke-width="2"/>"##,
        "</pattern></defs>\n"
    ));
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>"##);
    let cell = PLOT / resolution as f64;
    let single = cells.len() == 1;
    for &(tr, tg, predicted, majority) in &cells {
        let (x, y, size_x, size_y) = if single {
            (LEFT, TOP, PLOT, PLOT)
        } else {
            (px(tr.to_f64()) - cell / 2.0, py(tg.to_f64()) - cell / 2.0, cell, cell)
        };
        let fill = majority.map_or("#ffffff", outcome_fill);
        let _ = writeln!(s, r#"<rect x="{x:.2}" y="{y:.2}" width="{size_x:.2}" height="{size_y:.2}" fill="{fill}"/>"#);
        if !predicted.is_decided() {
            let inset = (size_x.min(size_y) * 0.15).max(0.5);
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{PURPLE}" stroke-width="{:.2}"/>"#,
                x + inset,
                y + inset,
                size_x - 2.0 * inset,
                size_y - 2.0 * inset,
                inset
            );
        }
    }
    let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{PLOT}" height="{PLOT}" fill="none" stroke="#000000"/>"##);
    for &(name, v) in &ov.verticals {
        if v > 0.0 && v < 1.0 {
            let x = px(v);
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#000000" stroke-dasharray="4 3" stroke-width="1"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="10">{name}</text>"##,
                TOP + PLOT,
                TOP - 6.0
            );
        }
    }
    for &(name, v) in &ov.horizontals {
        if v > 0.0 && v < 1.0 {
            let y = py(v);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#000000" stroke-dasharray="4 3" stroke-width="1"/><text x="{:.2}" y="{:.2}" font-size="10">{name}</text>"##,
                LEFT + PLOT,
                LEFT + PLOT + 4.0,
                y + 3.0
            );
        }
    }
    for line in &ov.domination {
        let pts: Vec<String> = line.iter().map(|&(r, g)| format!("{:.2},{:.2}", px(r), py(g))).collect();
        let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f4e9c" stroke-width="2"/>"##, pts.join(" "));
    }
    for k in 0..=4 {
        let v = k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{v}</text>"#, px(v), TOP + PLOT + 16.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v}</text>"#, LEFT - 6.0, py(v) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">tau_r</text>"#, px(0.5), TOP + PLOT + 36.0);
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">tau_g</text>"#,
        py(0.5),
        py(0.5)
    );
    let lx = LEFT + PLOT + 90.0;
    let mut ly = TOP + 10.0;
    for o in Outcome::ALL {
        let _ = writeln!(
            s,
            r##"<rect x="{lx}" y="{ly}" width="14" height="14" fill="{}" stroke="#000000" stroke-width="0.5"/><text x="{}" y="{}">{o}</text>"##,
            outcome_fill(o),
            lx + 20.0,
            ly + 11.0
        );
        ly += 20.0;
    }
    let _ = writeln!(
        s,
        r##"<rect x="{lx}" y="{ly}" width="14" height="14" fill="#ffffff" stroke="{PURPLE}" stroke-width="3"/><text x="{}" y="{}">undecided prediction</text>"##,
        lx + 20.0,
        ly + 11.0
    );
    ly += 20.0;
    let _ = writeln!(s, r##"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="#1f4e9c" stroke-width="2"/><text x="{}" y="{}">domination boundary</text>"##, ly + 7.0, lx + 14.0, ly + 7.0, lx + 20.0, ly + 11.0);
    ly += 30.0;
    for key in ["rho", "w", "n", "dynamic", "replicates"] {
        if let Some(v) = csv.metadata.get(key) {
            let _ = writeln!(s, r#"<text x="{lx}" y="{ly}">{key} = {v}</text>"#);
            ly += 16.0;
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Path of the annular sector between radii `r0 < r1` and angles `a0 < a1`.
fn sector(cx: f64, cy: f64, r0: f64, r1: f64, a0: f64, a1: f64) -> String {
    let p = |r: f64, a: f64| (cx + r * a.cos(), cy + r * a.sin());
    let large = (a1 - a0 > PI) as u8;
    let (x0, y0) = p(r1, a0);
    let (x1, y1) = p(r1, a1);
    let (x2, y2) = p(r0, a1);
    let (x3, y3) = p(r0, a0);
    format!(
        "M{x0:.3},{y0:.3}A{r1:.3},{r1:.3} 0 {large} 1 {x1:.3},{y1:.3}L{x2:.3},{y2:.3}A{r0:.3},{r0:.3} 0 {large} 0 {x3:.3},{y3:.3}Z"
    )
}

/// Fill for a bin holding `green` of `total` nodes: pure colours when
/// monochromatic, a red-to-green blend otherwise.
fn blend(green: usize, total: usize) -> String {
    let t = green as f64 / total as f64;
    let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
    // endpoints equal RED and GREEN
    format!("#{:02x}{:02x}{:02x}", mix(0xc0, 0x1a), mix(0x28, 0x7a), mix(0x2d, 0x36))
}

/// Sectors for one annulus, merging neighbouring arcs of equal fill.
fn annulus(s: &mut String, cx: f64, cy: f64, r0: f64, r1: f64, fills: &[String]) {
    let k = fills.len();
    if fills.iter().all(|f| *f == fills[0]) {
        let _ = writeln!(
            s,
            r#"<circle cx="{cx}" cy="{cy}" r="{:.3}" fill="none" stroke="{}" stroke-width="{:.3}"/>"#,
            (r0 + r1) / 2.0,
            fills[0],
            r1 - r0
        );
        return;
    }
    let step = 2.0 * PI / k as f64;
    let mut a = 0;
    while a < k {
        let mut b = a + 1;
        while b < k && fills[b] == fills[a] {
            b += 1;
        }
        let path = sector(cx, cy, r0, r1, a as f64 * step - PI / 2.0, b as f64 * step - PI / 2.0);
        let _ = writeln!(s, r#"<path d="{path}" fill="{}"/>"#, fills[a]);
        a = b;
    }
}

/// Arc fills for a colouring, one per node or per aggregated bin.
fn arc_fills(colors: &[Color]) -> Vec<String> {
    let n = colors.len();
    if n <= MAX_RING_ARCS {
        return colors.iter().map(|&c| color_fill(c).to_string()).collect();
    }
    (0..MAX_RING_ARCS)
        .map(|b| {
            let (lo, hi) = (b * n / MAX_RING_ARCS, (b + 1) * n / MAX_RING_ARCS);
            let green = colors[lo..hi].iter().filter(|&&c| c == Color::Green).count();
            blend(green, hi - lo)
        })
        .collect()
}

/// Radial history of a run: initial colours innermost, then a band marking
/// the initially unhappy nodes, then every change at a radius proportional
/// to its time, and the final colours outermost.
pub fn render_ring(record: &RunRecord) -> Result<String, RenderError> {
    if !record.events_recorded {
        return Err(RenderError::MissingEvents);
    }
    let initial = record.initial_colors.as_ref().ok_or(RenderError::MissingInitial)?;
    let final_colors = match &record.final_colors {
        Some(c) => c.clone(),
        None => replay(initial, &record.events).map_err(RenderError::Replay)?,
    };
    let n = initial.len();
    let ring = Ring::from_colors(initial.clone(), record.w, &record.scenario)?;
    let (size, cx, cy) = (820.0, 410.0, 400.0);
    let (inner0, inner1) = (110.0, 140.0);
    let (band0, band1) = (143.0, 151.0);
    let (mid0, mid1) = (156.0, 340.0);
    let (outer0, outer1) = (345.0, 375.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>"##);
    annulus(&mut s, cx, cy, inner0, inner1, &arc_fills(initial));
    let unhappy: Vec<bool> = (0..n).map(|x| ring.unhappy_set().contains(x)).collect();
    let band: Vec<String> = if n <= MAX_RING_ARCS {
        unhappy.iter().map(|&u| if u { "#000000" } else { "#ffffff" }.to_string()).collect()
    } else {
        (0..MAX_RING_ARCS)
            .map(|b| {
                let (lo, hi) = (b * n / MAX_RING_ARCS, (b + 1) * n / MAX_RING_ARCS);
                if unhappy[lo..hi].iter().any(|&u| u) { "#000000" } else { "#ffffff" }.to_string()
            })
            .collect()
    };
    annulus(&mut s, cx, cy, band0, band1, &band);
    let t_max = record.events.last().map_or(1, |e| e.time.max(1)) as f64;
    let radius = |t: u64| mid0 + (mid1 - mid0) * t as f64 / t_max;
    if record.events.len() <= MAX_EVENT_MARKS {
        let step = 2.0 * PI / n as f64;
        let thick = ((mid1 - mid0) / 200.0).max(1.0);
        for e in &record.events {
            let a = (e.node as f64 + 0.5) * step - PI / 2.0;
            let r = radius(e.time);
            let _ = writeln!(
                s,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{}" stroke-width="{:.3}"/>"#,
                cx + r * a.cos(),
                cy + r * a.sin(),
                cx + (r + thick) * a.cos(),
                cy + (r + thick) * a.sin(),
                color_fill(e.new_color),
                (step * r).clamp(0.3, 3.0)
            );
        }
    } else {
        // last change per (arc bin, time bucket)
        let bins = n.min(2_000);
        let buckets = 200usize;
        let mut grid: Vec<Option<Color>> = vec![None; bins * buckets];
        for e in &record.events {
            let b = e.node * bins / n;
            let t = (((e.time as f64 / t_max) * buckets as f64) as usize).min(buckets - 1);
            grid[t * bins + b] = Some(e.new_color);
        }
        let step = 2.0 * PI / bins as f64;
        let dr = (mid1 - mid0) / buckets as f64;
        for t in 0..buckets {
            for b in 0..bins {
                if let Some(c) = grid[t * bins + b] {
                    let r0 = mid0 + t as f64 * dr;
                    let path = sector(cx, cy, r0, r0 + dr, b as f64 * step - PI / 2.0, (b + 1) as f64 * step - PI / 2.0);
                    let _ = writeln!(s, r#"<path d="{path}" fill="{}"/>"#, color_fill(c));
                }
            }
        }
    }
    annulus(&mut s, cx, cy, outer0, outer1, &arc_fills(&final_colors));
    let _ = writeln!(
        s,
        r#"<text x="10" y="{:.0}">rho = {}, tau_g = {}, tau_r = {}, w = {}, n = {}, {} ({}, {} changes)</text>"#,
        size - 12.0,
        record.scenario.rho(),
        record.scenario.tau_g(),
        record.scenario.tau_r(),
        record.w,
        n,
        record.dynamic,
        record.termination,
        record.events.len()
    );
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{run, Dynamic, RunConfig};
    use crate::sweep::{read_csv, run_sweep, SweepConfig};
    use crate::tolerance::Scenario;

    #[test]
    fn blend_endpoints_match_palette() {
        assert_eq!(blend(0, 4), RED);
        assert_eq!(blend(4, 4), GREEN);
    }

    #[test]
    fn sector_is_closed_path() {
        let p = sector(0.0, 0.0, 1.0, 2.0, 0.0, 1.0);
        assert!(p.starts_with('M') && p.ends_with('Z'));
    }

    #[test]
    fn landscape_is_deterministic_and_uses_overlays() {
        let c = SweepConfig::new(0.42, 2, 200, Dynamic::Selective, 3, 1, 5);
        let csv = read_csv(run_sweep(&c).unwrap().to_csv_string().as_bytes()).unwrap();
        let a = render_landscape(&csv).unwrap();
        assert_eq!(a, render_landscape(&csv).unwrap());
        assert!(a.contains("kappa_g") && a.contains("mu_r") && a.contains("<polyline"));
        assert!(a.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn single_green_total_cell_fills_the_square() {
        let s = Scenario::parse(0.2, "0.25", "0.65").unwrap();
        let c = SweepConfig::point(0.2, s.tau_g(), s.tau_r(), 3, 400, Dynamic::Selective, 2, 1);
        let csv = read_csv(run_sweep(&c).unwrap().to_csv_string().as_bytes()).unwrap();
        let svg = render_landscape(&csv).unwrap();
        assert!(svg.contains(&format!(r#"width="600.00" height="600.00" fill="{GREEN}""#)));
    }

    #[test]
    fn zero_event_ring() {
        let s = Scenario::parse(0.5, "0.1", "0.1").unwrap();
        let mut ring = Ring::random(300, 3, &s, 2).unwrap();
        let rec = run(&mut ring, &RunConfig::new(Dynamic::Selective, 100, 2)).unwrap();
        assert!(rec.events.is_empty());
        let svg = render_ring(&rec).unwrap();
        assert!(!svg.contains("<line"));
        let paths: Vec<&str> = svg.lines().filter(|l| l.starts_with("<path")).collect();
        // the inner and outer annuli repeat the same fills
        assert_eq!(paths.len() % 2, 0);
    }

    #[test]
    fn missing_log_is_an_error() {
        let s = Scenario::parse(0.5, "0.4", "0.4").unwrap();
        let mut ring = Ring::random(300, 3, &s, 2).unwrap();
        let rec = run(&mut ring, &RunConfig::new(Dynamic::Selective, 100, 2).summary_only()).unwrap();
        assert!(matches!(render_ring(&rec), Err(RenderError::MissingEvents)));
    }
}
