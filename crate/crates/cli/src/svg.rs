//! Deterministic SVG line drawings. Coordinates are printed with three
//! decimals so identical input gives identical bytes.

use std::fmt::Write as _;

use cerfmorse::algebra::ring::rational_to_f64;
use cerfmorse::algebra::{format_rational, Pid};
use cerfmorse::cerf::{front_projection, CerfError, CerfTuple};
use cerfmorse::tracker::{SpectralTrace, Window};
use cerfmorse::Rational;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 40.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Maps (r, value) in `[0, 1] × [lo, hi]` to the plot area.
struct Frame {
    lo: f64,
    hi: f64,
}

impl Frame {
    fn new(lo: f64, hi: f64) -> Self {
        let (lo, hi) = if hi - lo < 1e-9 { (lo - 1.0, hi + 1.0) } else { (lo, hi) };
        let pad = (hi - lo) * 0.08;
        Frame { lo: lo - pad, hi: hi + pad }
    }

    fn x(&self, r: f64) -> f64 {
        LEFT + r * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v - self.lo) / (self.hi - self.lo) * (HEIGHT - TOP - BOTTOM)
    }

    fn point(&self, r: &Rational, v: &Rational) -> String {
        format!("{:.3},{:.3}", self.x(rational_to_f64(r)), self.y(rational_to_f64(v)))
    }

    fn open(&self, title: &str, out: &mut String) {
        let _ = writeln!(
            out,
            r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"##
        );
        let _ = writeln!(out, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"##);
        let _ = writeln!(
            out,
            r##"<clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{:.3}" height="{:.3}"/></clipPath>"##,
            WIDTH - LEFT - RIGHT,
            HEIGHT - TOP - BOTTOM
        );
        let _ = writeln!(out, r##"<text x="{LEFT}" y="{:.3}" font-size="13">{}</text>"##, TOP - 16.0, escape(title));
        let _ = writeln!(
            out,
            r##"<rect x="{LEFT}" y="{TOP}" width="{:.3}" height="{:.3}" fill="none" stroke="black"/>"##,
            WIDTH - LEFT - RIGHT,
            HEIGHT - TOP - BOTTOM
        );
        for k in 0..=4 {
            let r = k as f64 / 4.0;
            let x = self.x(r);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}" stroke="black"/><text x="{x:.3}" y="{:.3}" text-anchor="middle">{r:.2}</text>"##,
                HEIGHT - BOTTOM,
                HEIGHT - BOTTOM + 5.0,
                HEIGHT - BOTTOM + 18.0
            );
        }
        for k in 0..=4 {
            let v = self.lo + (self.hi - self.lo) * k as f64 / 4.0;
            let y = self.y(v);
            let _ = writeln!(
                out,
                r##"<line x1="{:.3}" y1="{y:.3}" x2="{LEFT}" y2="{y:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" text-anchor="end">{v:.3}</text>"##,
                LEFT - 5.0,
                LEFT - 8.0,
                y + 4.0
            );
        }
        let _ = writeln!(out, r##"<text x="{:.3}" y="{:.3}" text-anchor="end">r</text>"##, WIDTH - RIGHT, HEIGHT - 6.0);
    }
}

/// Arcs as polylines, cusps as dots, events as dashed verticals and the
/// window cutoffs as grey dashed profiles.
pub fn cerf_diagram(title: &str, t: &CerfTuple, events: &[Rational], window: Option<&Window>) -> Result<String, CerfError> {
    let front = front_projection(t)?;
    let (lo, hi) = t.f3_range().map_or((0.0, 1.0), |(a, b)| (rational_to_f64(&a), rational_to_f64(&b)));
    let frame = Frame::new(lo, hi);
    let mut out = String::new();
    frame.open(title, &mut out);
    let _ = writeln!(out, r##"<g clip-path="url(#plot)">"##);
    for r in events {
        let x = frame.x(rational_to_f64(r));
        let _ = writeln!(
            out,
            r##"<line x1="{x:.3}" y1="{TOP}" x2="{x:.3}" y2="{:.3}" stroke="#888" stroke-dasharray="4 3"/>"##,
            HEIGHT - BOTTOM
        );
    }
    if let Some(w) = window {
        for p in [&w.a, &w.b] {
            let pts: Vec<String> = p.points().iter().map(|(r, v)| frame.point(r, v)).collect();
            let _ = writeln!(
                out,
                r##"<polyline points="{}" fill="none" stroke="#aaa" stroke-dasharray="6 4"/>"##,
                pts.join(" ")
            );
        }
    }
    for (k, line) in front.polylines.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = line.points.iter().map(|(r, v)| frame.point(r, v)).collect();
        let _ = writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"##,
            pts.join(" ")
        );
    }
    let _ = writeln!(out, "</g>");
    for (k, line) in front.polylines.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        if let Some((r, v)) = line.points.first() {
            let _ = writeln!(
                out,
                r##"<text x="{:.3}" y="{:.3}" fill="{colour}">{}</text>"##,
                frame.x(rational_to_f64(r)) + 3.0,
                frame.y(rational_to_f64(v)) - 4.0,
                escape(line.arc.as_str())
            );
        }
    }
    for c in &front.cusps {
        let (x, y) = (frame.x(rational_to_f64(&c.r)), frame.y(rational_to_f64(&c.f3)));
        let _ = writeln!(
            out,
            r##"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="black"/><text x="{:.3}" y="{:.3}">{} {}</text>"##,
            x + 5.0,
            y + 12.0,
            c.kind,
            escape(c.vertex.as_str())
        );
    }
    for r in events {
        let _ = writeln!(
            out,
            r##"<text x="{:.3}" y="{:.3}" fill="#666" text-anchor="middle">{}</text>"##,
            frame.x(rational_to_f64(r)),
            TOP - 4.0,
            format_rational(r)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// ρ against r: one segment per action-order piece, transfers marked.
pub fn spectral_trace<R: Pid>(title: &str, trace: &SpectralTrace<R>) -> String {
    let values: Vec<f64> = trace
        .segments
        .iter()
        .flat_map(|s| [&s.rho_lo, &s.rho_hi])
        .filter_map(|v| v.as_ref().map(rational_to_f64))
        .collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let frame = if values.is_empty() { Frame::new(0.0, 1.0) } else { Frame::new(lo, hi) };
    let mut out = String::new();
    frame.open(title, &mut out);
    let _ = writeln!(out, r##"<g clip-path="url(#plot)">"##);
    let mut previous: Option<String> = None;
    for s in &trace.segments {
        let (Some(a), Some(b)) = (&s.rho_lo, &s.rho_hi) else {
            previous = None;
            continue;
        };
        let start = frame.point(&s.lo, a);
        if let Some(p) = &previous {
            if p != &start {
                let _ = writeln!(
                    out,
                    r##"<polyline points="{p} {start}" fill="none" stroke="#1f77b4" stroke-dasharray="2 2"/>"##
                );
            }
        }
        let end = frame.point(&s.hi, b);
        let _ = writeln!(out, r##"<polyline points="{start} {end}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##);
        previous = Some(end);
    }
    let _ = writeln!(out, "</g>");
    for t in &trace.transfers {
        let Some(v) = &t.value else { continue };
        let (x, y) = (frame.x(rational_to_f64(&t.r)), frame.y(rational_to_f64(v)));
        let label = format!(
            "{} → {}",
            t.from.as_ref().map_or("-", |c| c.as_str()),
            t.to.as_ref().map_or("-", |c| c.as_str())
        );
        let _ = writeln!(
            out,
            r##"<circle cx="{x:.3}" cy="{y:.3}" r="3.5" fill="#d62728"/><text x="{:.3}" y="{:.3}">{}</text>"##,
            x + 5.0,
            y - 6.0,
            escape(&label)
        );
    }
    let _ = writeln!(
        out,
        r##"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"##,
        WIDTH - RIGHT,
        TOP - 16.0,
        escape(&trace.status.to_string())
    );
    out.push_str("</svg>\n");
    out
}
