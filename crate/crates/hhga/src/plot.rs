//! Minimal SVG: worst margin per theorem against the first varying parameter.

use std::collections::BTreeMap;
use std::fmt::Write;

use hhga_core::bounds::{Outcome, ParamPoint, TheoremId};

use crate::report::SweepResult;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

type Axis = (&'static str, fn(&ParamPoint) -> f64);

const AXES: [Axis; 8] = [
    ("alpha", |p| p.alpha),
    ("m", |p| p.m),
    ("q", |p| p.q),
    ("p", |p| p.p.unwrap_or(f64::NAN)),
    ("alpha2", |p| p.alpha2.unwrap_or(f64::NAN)),
    ("m2", |p| p.m2.unwrap_or(f64::NAN)),
    ("a", |p| p.a),
    ("b", |p| p.b),
];

fn pick_axis(result: &SweepResult) -> Option<Axis> {
    AXES.into_iter().find(|(_, get)| {
        let mut vals = result.points.iter().map(|p| get(&p.point)).filter(|v| v.is_finite());
        match vals.next() {
            Some(first) => vals.any(|v| v != first),
            None => false,
        }
    })
}

/// Series of `(x, worst margin)` per theorem, x ascending.
pub fn series(result: &SweepResult) -> (String, BTreeMap<TheoremId, Vec<(f64, f64)>>) {
    let axis = pick_axis(result);
    let label = axis.map_or("point index".to_string(), |(n, _)| n.to_string());
    let mut out: BTreeMap<TheoremId, Vec<(f64, f64)>> = BTreeMap::new();
    for (i, p) in result.points.iter().enumerate() {
        let x = axis.map_or(i as f64, |(_, get)| get(&p.point));
        for r in &p.reports {
            if r.outcome == Outcome::NotApplicable || !r.margin.is_finite() || !x.is_finite() {
                continue;
            }
            out.entry(r.theorem_id).or_default().push((x, r.margin));
        }
    }
    for pts in out.values_mut() {
        pts.sort_by(|u, v| u.0.total_cmp(&v.0));
        pts.dedup_by(|later, earlier| {
            if later.0 == earlier.0 {
                earlier.1 = earlier.1.min(later.1);
                true
            } else {
                false
            }
        });
    }
    (label, out)
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5 * lo.abs().max(1.0), hi + 0.5 * hi.abs().max(1.0))
    } else {
        (lo, hi)
    }
}

pub fn render(result: &SweepResult) -> String {
    let (label, data) = series(result);
    let (x0, x1) = range(data.values().flatten().map(|p| p.0));
    let (y0, y1) = range(data.values().flatten().map(|p| p.1).chain([0.0]));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let zero = sy(0.0);
    let _ = writeln!(
        s,
        r##"<line x1="{LEFT}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
        LEFT + pw
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xv:.3}</text>"#,
            sx(xv),
            TOP + ph + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.3e}</text>"#,
            LEFT - 6.0,
            sy(yv) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">worst margin</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (k, (id, pts)) in data.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        for c in &coords {
            let (cx, cy) = c.split_once(',').expect("formatted above");
            let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="2" fill="{color}"/>"#);
        }
        let ly = TOP + 14.0 * k as f64 + 10.0;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{id}</text>"#,
            ly - 4.0,
            lx + 18.0,
            ly - 4.0,
            lx + 24.0,
            ly
        );
    }
    s.push_str("</svg>\n");
    s
}
