//! SVG figures of a pair: both boundaries, the origin, the dashed dilates
//! `r ∂L` and `R ∂L` at their witness translations, and optionally a polar
//! plot of the relative curvature radius.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::dilation::{inradius, outradius};
use crate::error::{Error, Result};
use crate::support_body::SupportBody;

pub const BOUNDARY_SAMPLES: usize = 512;
const CANVAS: f64 = 600.0;
const MARGIN: f64 = 30.0;
const INSET: f64 = 160.0;

#[derive(Clone, Copy, Debug)]
pub struct PlotOptions {
    pub samples: usize,
    /// Add a polar inset of `ρ(θ)`.
    pub rho: bool,
    /// Nodes for the radius programs.
    pub nodes: usize,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            samples: BOUNDARY_SAMPLES,
            rho: false,
            nodes: 1024,
        }
    }
}

/// `x(θ) = h(θ) u(θ) + h'(θ) u'(θ)` at `samples` equally spaced normals.
pub fn boundary_samples(body: &SupportBody, samples: usize) -> Vec<[f64; 2]> {
    (0..samples)
        .map(|j| body.boundary_point(TAU * j as f64 / samples as f64))
        .collect()
}

/// Polar curve `ρ(θ) u(θ)` sampled at `samples` angles.
pub fn rho_samples(k: &SupportBody, l: &SupportBody, samples: usize) -> Result<Vec<[f64; 2]>> {
    (0..samples)
        .map(|j| {
            let theta = TAU * j as f64 / samples as f64;
            let den = l.curvature_radius(theta);
            if den <= 0.0 {
                return Err(Error::Domain(format!("h_L + h_L'' = {den} at θ = {theta}")));
            }
            let rho = k.curvature_radius(theta) / den;
            Ok([rho * theta.cos(), rho * theta.sin()])
        })
        .collect()
}

struct Frame {
    min: [f64; 2],
    scale: f64,
    offset: [f64; 2],
}

impl Frame {
    fn fit(points: impl Iterator<Item = [f64; 2]>, origin: [f64; 2], size: f64) -> Self {
        let (mut lo, mut hi) = ([0.0f64; 2], [0.0f64; 2]);
        for p in points {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        Self {
            min: lo,
            scale: size / span,
            offset: origin,
        }
    }

    /// World to canvas, with the y axis pointing up.
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            self.offset[0] + (p[0] - self.min[0]) * self.scale,
            self.offset[1] - (p[1] - self.min[1]) * self.scale,
        )
    }
}

fn path(frame: &Frame, points: &[[f64; 2]]) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let (x, y) = frame.map(*p);
        let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
    }
    d.push('Z');
    d
}

pub fn render_svg(k: &SupportBody, l: &SupportBody, opts: &PlotOptions) -> Result<String> {
    let (r, x_in) = inradius(k, l, opts.nodes)?;
    let (big_r, x_out) = outradius(k, l, opts.nodes)?;
    let bk = boundary_samples(k, opts.samples);
    let bl = boundary_samples(l, opts.samples);
    let dilate = |t: f64, x: [f64; 2]| -> Vec<[f64; 2]> {
        bl.iter()
            .map(|p| [t * p[0] + x[0], t * p[1] + x[1]])
            .collect()
    };
    let inner = dilate(r, x_in);
    let outer = dilate(big_r, x_out);

    let side = CANVAS - 2.0 * MARGIN;
    let frame = Frame::fit(
        bk.iter().chain(&bl).chain(&inner).chain(&outer).copied(),
        [MARGIN, CANVAS - MARGIN],
        side,
    );

    let width = if opts.rho {
        CANVAS + INSET + MARGIN
    } else {
        CANVAS
    };
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{CANVAS}" viewBox="0 0 {width} {CANVAS}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let curves = [
        ("outer", &outer, "#888888", " stroke-dasharray=\"6,4\""),
        ("inner", &inner, "#888888", " stroke-dasharray=\"6,4\""),
        ("L", &bl, "#d62728", ""),
        ("K", &bk, "#1f77b4", ""),
    ];
    for (id, pts, colour, dash) in curves {
        let _ = writeln!(
            svg,
            r#"<path id="{id}" d="{}" fill="none" stroke="{colour}" stroke-width="1.5"{dash}/>"#,
            path(&frame, pts)
        );
    }
    let (ox, oy) = frame.map([0.0, 0.0]);
    let _ = writeln!(
        svg,
        r#"<circle id="origin" cx="{ox:.3}" cy="{oy:.3}" r="3" fill="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="12">r = {r:.6}, R = {big_r:.6}</text>"#,
        MARGIN - 10.0
    );

    if opts.rho {
        let polar = rho_samples(k, l, opts.samples)?;
        // centre the inset on ρ = 0 so a constant ρ draws a circle
        let reach = polar
            .iter()
            .map(|p| p[0].hypot(p[1]))
            .fold(0.0, f64::max)
            .max(1e-12);
        let left = CANVAS;
        let inset_frame = Frame {
            min: [-reach, -reach],
            scale: INSET / (2.0 * reach),
            offset: [left, MARGIN + INSET],
        };
        let _ = writeln!(
            svg,
            r##"<rect x="{left}" y="{MARGIN}" width="{INSET}" height="{INSET}" fill="none" stroke="#cccccc"/>"##
        );
        let _ = writeln!(
            svg,
            r##"<path id="rho" d="{}" fill="none" stroke="#2ca02c" stroke-width="1.2"/>"##,
            path(&inset_frame, &polar)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{left}" y="{}" font-family="sans-serif" font-size="12">rho(theta)</text>"#,
            MARGIN + INSET + 15.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
