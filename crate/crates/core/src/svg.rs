//! Deterministic SVG drawings of an instrument at a position.
//!
//! Output depends only on the spec, the position and the show-reading flag:
//! fixed canvas per kind, fixed element order, six decimal places.

use std::fmt::Write as _;

use crate::error::Error;
use crate::geometry::{geometry_template, moving_transform, revolution_transform, Mark, MarkTier};
use crate::instruments::{coincidence_index, reading_text};
use crate::model::{InstrumentKind, InstrumentSpec, TickPosition};
use crate::Rational;

const FIXED: &str = "#222222";
const MOVING: &str = "#1f4e99";
const HIGHLIGHT: &str = "#d62828";

fn num(v: f64) -> String {
    let v = if v.abs() < 5e-7 { 0.0 } else { v };
    format!("{v:.6}")
}

fn f(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Canvas {
    out: String,
}

impl Canvas {
    fn new(width: u32, height: u32, title: &str) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
        );
        let _ = writeln!(out, "<title>{}</title>", escape(title));
        let _ = writeln!(out, r##"<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>"##);
        Canvas { out }
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="{}"/>"#,
            num(x1),
            num(y1),
            num(x2),
            num(y2),
            num(width)
        );
    }

    fn text(&mut self, x: f64, y: f64, size: u32, fill: &str, body: &str) {
        let _ = writeln!(
            self.out,
            r#"<text x="{}" y="{}" font-size="{size}" text-anchor="middle" fill="{fill}">{}</text>"#,
            num(x),
            num(y),
            escape(body)
        );
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: &str) {
        let _ = writeln!(
            self.out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="{stroke}"/>"#,
            num(x),
            num(y),
            num(w),
            num(h)
        );
    }

    fn circle(&mut self, cx: f64, cy: f64, r: f64, stroke: &str) {
        let _ = writeln!(
            self.out,
            r##"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="{stroke}" stroke-width="2.000000"/>"##,
            num(cx),
            num(cy),
            num(r)
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn tick_len(m: &Mark, major: f64, minor: f64) -> f64 {
    match m.tier {
        MarkTier::Major => major,
        MarkTier::Minor => minor,
    }
}

/// Draws `spec` at `pos`. With `show_reading` the coinciding vernier mark
/// is highlighted and the reading breakdown is printed under the drawing.
pub fn render_svg(spec: &InstrumentSpec, pos: TickPosition, show_reading: bool) -> Result<String, Error> {
    spec.check(pos)?;
    let text = if show_reading { Some(reading_text(spec, pos)?) } else { None };
    let highlight = if show_reading { coincidence_index(spec, pos).ok() } else { None };
    let title = format!("{} at {} ticks", spec.kind().display_name(), pos);
    match spec.kind() {
        InstrumentKind::VernierCaliper => caliper(spec, pos, &title, highlight, text.as_deref()),
        InstrumentKind::Micrometer => micrometer(spec, pos, &title, text.as_deref()),
        InstrumentKind::DialIndicator => dial(spec, pos, &title, text.as_deref()),
        InstrumentKind::VernierProtractor => protractor(spec, pos, &title, highlight, text.as_deref()),
    }
}

fn caliper(
    spec: &InstrumentSpec,
    pos: TickPosition,
    title: &str,
    highlight: Option<u32>,
    text: Option<&str>,
) -> Result<String, Error> {
    let g = geometry_template(spec);
    let shift = f(moving_transform(spec, pos)?.amount);
    let (x0, base) = (20.0, 100.0);
    let span = f(g.fixed_marks.last().map_or(Rational::from_integer(1), |m| m.axis_pos));
    let scale = 960.0 / span;
    let mut c = Canvas::new(1000, 260, title);
    c.line(x0, base, x0 + span * scale, base, FIXED, 1.0);
    for m in &g.fixed_marks {
        let x = x0 + f(m.axis_pos) * scale;
        c.line(x, base, x, base - tick_len(m, 30.0, 15.0), FIXED, 1.0);
        if let Some(l) = &m.label {
            c.text(x, base - 38.0, 12, FIXED, l);
        }
    }
    for (j, m) in g.moving_marks.iter().enumerate() {
        let x = x0 + (f(m.axis_pos) + shift) * scale;
        let hot = highlight == Some(j as u32);
        let colour = if hot { HIGHLIGHT } else { MOVING };
        c.line(x, base, x, base + tick_len(m, 28.0, 16.0), colour, if hot { 2.0 } else { 1.0 });
        if let Some(l) = &m.label {
            c.text(x, base + 44.0, 12, colour, l);
        }
    }
    if let Some(t) = text {
        c.text(500.0, 230.0, 16, FIXED, t);
    }
    Ok(c.finish())
}

fn micrometer(spec: &InstrumentSpec, pos: TickPosition, title: &str, text: Option<&str>) -> Result<String, Error> {
    let g = geometry_template(spec);
    let shift = f(moving_transform(spec, pos)?.amount);
    let (x0, axis, scale) = (40.0, 150.0, 30.0);
    let mut c = Canvas::new(1000, 300, title);
    let edge = x0 + shift * scale;
    c.line(x0, axis, edge, axis, FIXED, 1.0);
    for (i, m) in g.fixed_marks.iter().enumerate() {
        let x = x0 + f(m.axis_pos) * scale;
        if x > edge + 1e-9 {
            break;
        }
        // Whole millimetres above the reference line, half marks below.
        if i % 2 == 0 {
            c.line(x, axis, x, axis - tick_len(m, 20.0, 12.0), FIXED, 1.0);
        } else {
            c.line(x, axis, x, axis + 12.0, FIXED, 1.0);
        }
        if let Some(l) = &m.label {
            c.text(x, axis - 26.0, 11, FIXED, l);
        }
    }
    c.rect(edge, 60.0, 120.0, 180.0, "#e8eef8", MOVING);
    let count = g.moving_marks.len() as i64;
    let rot = i64::from(pos.ticks()) % count;
    let spacing = 8.0;
    for d in -10..=10i64 {
        let j = (rot + d).rem_euclid(count) as usize;
        let m = &g.moving_marks[j];
        let y = axis - d as f64 * spacing;
        let colour = if d == 0 && text.is_some() { HIGHLIGHT } else { MOVING };
        c.line(edge, y, edge + tick_len(m, 22.0, 12.0), y, colour, 1.0);
        if let Some(l) = &m.label {
            c.text(edge + 36.0, y + 4.0, 11, colour, l);
        }
    }
    if let Some(t) = text {
        c.text(500.0, 280.0, 16, FIXED, t);
    }
    Ok(c.finish())
}

fn polar(cx: f64, cy: f64, r: f64, clockwise_deg: f64) -> (f64, f64) {
    let a = clockwise_deg.to_radians();
    (cx + r * a.sin(), cy - r * a.cos())
}

fn dial(spec: &InstrumentSpec, pos: TickPosition, title: &str, text: Option<&str>) -> Result<String, Error> {
    let g = geometry_template(spec);
    let hand = f(moving_transform(spec, pos)?.amount);
    let counter = revolution_transform(spec, pos)?.map_or(0.0, |t| f(t.amount));
    let (cx, cy, r) = (200.0, 190.0, 160.0);
    let mut c = Canvas::new(400, 410, title);
    c.circle(cx, cy, r, FIXED);
    for m in &g.fixed_marks {
        let a = f(m.axis_pos);
        let (x1, y1) = polar(cx, cy, r, a);
        let (x2, y2) = polar(cx, cy, r - tick_len(m, 18.0, 9.0), a);
        c.line(x1, y1, x2, y2, FIXED, 1.0);
        if let Some(l) = &m.label {
            let (x, y) = polar(cx, cy, r - 32.0, a);
            c.text(x, y + 4.0, 12, FIXED, l);
        }
    }
    let (ccx, ccy, cr) = (cx, cy + 70.0, 30.0);
    c.circle(ccx, ccy, cr, FIXED);
    for m in &g.counter_marks {
        let a = f(m.axis_pos);
        let (x1, y1) = polar(ccx, ccy, cr, a);
        let (x2, y2) = polar(ccx, ccy, cr - 6.0, a);
        c.line(x1, y1, x2, y2, FIXED, 1.0);
    }
    let (hx, hy) = polar(ccx, ccy, cr - 8.0, counter);
    c.line(ccx, ccy, hx, hy, MOVING, 2.0);
    let (hx, hy) = polar(cx, cy, r - 24.0, hand);
    c.line(cx, cy, hx, hy, if text.is_some() { HIGHLIGHT } else { MOVING }, 3.0);
    if let Some(t) = text {
        c.text(200.0, 395.0, 14, FIXED, t);
    }
    Ok(c.finish())
}

fn protractor(
    spec: &InstrumentSpec,
    pos: TickPosition,
    title: &str,
    highlight: Option<u32>,
    text: Option<&str>,
) -> Result<String, Error> {
    let g = geometry_template(spec);
    let shift = f(moving_transform(spec, pos)?.amount);
    let (cx, cy, r) = (400.0, 400.0, 320.0);
    // Counter-clockwise from three o'clock.
    let at = |radius: f64, deg: f64| {
        let a = deg.to_radians();
        (cx + radius * a.cos(), cy - radius * a.sin())
    };
    let mut c = Canvas::new(800, 520, title);
    for m in &g.fixed_marks {
        let a = f(m.axis_pos);
        let (x1, y1) = at(r, a);
        let (x2, y2) = at(r + tick_len(m, 20.0, 10.0), a);
        c.line(x1, y1, x2, y2, FIXED, 1.0);
        if let Some(l) = &m.label {
            let (x, y) = at(r + 34.0, a);
            c.text(x, y + 4.0, 12, FIXED, l);
        }
    }
    for (j, m) in g.moving_marks.iter().enumerate() {
        let a = f(m.axis_pos) + shift;
        let hot = highlight == Some(j as u32);
        let colour = if hot { HIGHLIGHT } else { MOVING };
        let (x1, y1) = at(r, a);
        let (x2, y2) = at(r - tick_len(m, 20.0, 12.0), a);
        c.line(x1, y1, x2, y2, colour, if hot { 2.0 } else { 1.0 });
        if let Some(l) = &m.label {
            let (x, y) = at(r - 34.0, a);
            c.text(x, y + 4.0, 11, colour, l);
        }
    }
    let (x, y) = at(r - 60.0, shift);
    c.line(cx, cy, x, y, MOVING, 1.0);
    if let Some(t) = text {
        c.text(400.0, 505.0, 16, FIXED, t);
    }
    Ok(c.finish())
}
