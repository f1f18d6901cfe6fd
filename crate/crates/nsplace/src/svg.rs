//! Standalone SVG 1.1 drawings of a placement. One user unit is one
//! millimetre; y is flipped so the board origin sits bottom-left.

use std::fmt::Write as _;

use nsplace_core::geometry::convex_hull;
use nsplace_core::metrics::star_segments;
use nsplace_core::{Design, Placement, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    /// Draw the convex hull of every net with at least three non-collinear
    /// pins.
    pub hulls: bool,
    /// Pixels per millimetre for the width/height attributes.
    pub scale: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self { hulls: false, scale: 10.0 }
    }
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(design: &Design, placement: &Placement, opts: &SvgOptions) -> String {
    let (w, h) = (design.board.width, design.board.height);
    let m = 0.02 * w.max(h);
    let fy = |y: f64| h - y;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        (w + 2.0 * m) * opts.scale,
        (h + 2.0 * m) * opts.scale,
        -m,
        -m,
        w + 2.0 * m,
        h + 2.0 * m
    );
    let stroke = 0.002 * w.max(h);
    let _ = writeln!(s, r#"<rect class="board" x="0" y="0" width="{w}" height="{h}" fill="white" stroke="black" stroke-width="{}"/>"#, 2.0 * stroke);

    s.push_str("<g class=\"components\">\n");
    let font = 0.3 * design.components.iter().map(|c| c.width.min(c.height)).fold(f64::INFINITY, f64::min).min(w.max(h) / 20.0);
    for (i, comp) in design.components.iter().enumerate() {
        let r = design.footprint(placement, i);
        let fill = if comp.is_fixed() { "#bbbbbb" } else { "#e8eef8" };
        let _ = writeln!(
            s,
            r#"<rect class="comp" x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="dimgray" stroke-width="{stroke}"/>"#,
            r.x,
            fy(r.y + r.h),
            r.w,
            r.h
        );
        let c = r.center();
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="{font}" text-anchor="middle" dominant-baseline="middle">{}</text>"#, c.x, fy(c.y), escape(&comp.id));
    }
    s.push_str("</g>\n");

    if opts.hulls {
        s.push_str("<g class=\"hulls\">\n");
        for (e, pins) in design.all_net_pins(placement).iter().enumerate() {
            let Ok(hull) = convex_hull(pins) else { continue };
            if hull.len() < 3 {
                continue;
            }
            let pts: Vec<String> = hull.vertices.iter().map(|p: &Point| format!("{},{}", p.x, fy(p.y))).collect();
            let color = PALETTE[e % PALETTE.len()];
            let _ = writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="{stroke}"/>"#, pts.join(" "));
        }
        s.push_str("</g>\n");
    }

    s.push_str("<g class=\"nets\">\n");
    for (e, seg) in star_segments(design, placement) {
        let color = PALETTE[e % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="{stroke}"/>"#,
            seg.a.x,
            fy(seg.a.y),
            seg.b.x,
            fy(seg.b.y)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
