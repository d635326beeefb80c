//! Deterministic SVG output. Coordinates are printed with four decimals and
//! the y axis is flipped so that the picture matches the math orientation.

use super::{Ambient, Layout, Placement, Point};
use crate::complex::CellComplex;
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq)]
pub struct SvgStyle {
    /// Draw the nerve: segments joining centers of adjacent circles.
    pub triangulation: bool,
    /// Per-vertex values mapped to fill color; `None` leaves circles unfilled.
    pub coloring: Option<Vec<f64>>,
    pub stroke_width: f64,
    /// Pixel width of the output; the height follows the view box.
    pub width: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { triangulation: false, coloring: None, stroke_width: 0.002, width: 800.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct ViewBox {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
}

fn view_box(layout: &Layout) -> ViewBox {
    if layout.ambient == Ambient::Disk {
        return ViewBox { x0: -1.05, y0: -1.05, w: 2.1, h: 2.1 };
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in &layout.placements {
        if let Placement::Circle { center, radius } = *p {
            for k in 0..2 {
                lo[k] = lo[k].min(center[k] - radius);
                hi[k] = hi[k].max(center[k] + radius);
            }
        }
    }
    if !lo[0].is_finite() {
        return ViewBox { x0: -1.0, y0: -1.0, w: 2.0, h: 2.0 };
    }
    let pad = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    ViewBox { x0: lo[0] - pad, y0: -(hi[1] + pad), w: hi[0] - lo[0] + 2.0 * pad, h: hi[1] - lo[1] + 2.0 * pad }
}

/// Segment of the line `⟨p, normal⟩ = offset` inside the box, if any.
fn clip_line(normal: Point, offset: f64, vb: ViewBox) -> Option<(Point, Point)> {
    let (xmin, xmax) = (vb.x0, vb.x0 + vb.w);
    let (ymin, ymax) = (-(vb.y0 + vb.h), -vb.y0);
    let base = [normal[0] * offset, normal[1] * offset];
    let dir = [-normal[1], normal[0]];
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (b, d, lo, hi) in [(base[0], dir[0], xmin, xmax), (base[1], dir[1], ymin, ymax)] {
        if d.abs() < 1e-300 {
            if b < lo || b > hi {
                return None;
            }
            continue;
        }
        let (a, c) = ((lo - b) / d, (hi - b) / d);
        t0 = t0.max(a.min(c));
        t1 = t1.min(a.max(c));
    }
    (t0 < t1).then(|| ([base[0] + t0 * dir[0], base[1] + t0 * dir[1]], [base[0] + t1 * dir[0], base[1] + t1 * dir[1]]))
}

/// Blue through white to red, symmetric about zero.
fn diverging_color(value: f64, scale: f64) -> String {
    let s = if scale > 0.0 { (value / scale).clamp(-1.0, 1.0) } else { 0.0 };
    let fade = |x: f64| (255.0 * (1.0 - x.abs())).round() as u8;
    let (r, g, b) = if s >= 0.0 { (255, fade(s), fade(s)) } else { (fade(s), fade(s), 255) };
    format!("#{r:02x}{g:02x}{b:02x}")
}

pub fn render_svg(layout: &Layout, complex: &CellComplex, style: &SvgStyle) -> String {
    let vb = view_box(layout);
    let height = style.width * vb.h / vb.w;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.4}" height="{:.4}" viewBox="{:.4} {:.4} {:.4} {:.4}">"#,
        style.width, height, vb.x0, vb.y0, vb.w, vb.h
    );
    let sw = style.stroke_width * vb.w.max(vb.h);
    if layout.ambient == Ambient::Disk {
        let _ = writeln!(out, r#"<circle cx="0.0000" cy="0.0000" r="1.0000" fill="none" stroke="black" stroke-width="{sw:.4}"/>"#);
    }
    let scale = style
        .coloring
        .as_ref()
        .map(|c| c.iter().fold(0.0f64, |m, x| m.max(x.abs())))
        .unwrap_or(0.0);
    for (v, p) in layout.placements.iter().enumerate() {
        match *p {
            Placement::Circle { center, radius } => {
                let fill = style
                    .coloring
                    .as_ref()
                    .and_then(|c| c.get(v))
                    .map_or_else(|| "none".to_string(), |&x| diverging_color(x, scale));
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.4}" cy="{:.4}" r="{:.4}" fill="{fill}" stroke="black" stroke-width="{sw:.4}"/>"#,
                    center[0], -center[1], radius
                );
            }
            Placement::Line { normal, offset } => {
                if let Some((a, b)) = clip_line(normal, offset, vb) {
                    let _ = writeln!(
                        out,
                        r#"<line x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}" stroke="black" stroke-width="{sw:.4}"/>"#,
                        a[0], -a[1], b[0], -b[1]
                    );
                }
            }
            Placement::Unplaced => {}
        }
    }
    if style.triangulation {
        for e in complex.edges() {
            let (Some((a, _)), Some((b, _))) = (layout.placements[e.u].circle(), layout.placements[e.v].circle()) else {
                continue;
            };
            let _ = writeln!(
                out,
                r#"<line x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}" stroke="gray" stroke-width="{:.4}"/>"#,
                a[0], -a[1], b[0], -b[1], sw / 2.0
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Log-log polyline of a decaying positive series; non-positive samples and
/// `t = 0` are skipped.
pub fn render_decay_plot(times: &[f64], values: &[f64]) -> String {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t > 0.0 && **v > 0.0 && v.is_finite())
        .map(|(t, v)| (t.log10(), v.log10()))
        .collect();
    let (w, h, m) = (640.0, 480.0, 40.0);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.4}" height="{h:.4}" viewBox="0 0 {w:.4} {h:.4}">"#);
    if pts.len() >= 2 {
        let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let (y0, y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
        let sx = (w - 2.0 * m) / (x1 - x0).max(1e-12);
        let sy = (h - 2.0 * m) / (y1 - y0).max(1e-12);
        let _ = write!(out, r#"<polyline fill="none" stroke="black" stroke-width="1.0000" points=""#);
        for (i, (x, y)) in pts.iter().enumerate() {
            let sep = if i == 0 { "" } else { " " };
            let _ = write!(out, "{sep}{:.4},{:.4}", m + (x - x0) * sx, h - m - (y - y0) * sy);
        }
        out.push_str("\"/>\n");
        let _ = writeln!(
            out,
            r#"<text x="{m:.4}" y="{:.4}" font-size="12">log10 t: {x0:.4} .. {x1:.4}, log10 value: {y0:.4} .. {y1:.4}</text>"#,
            h - 8.0
        );
    }
    out.push_str("</svg>\n");
    out
}
