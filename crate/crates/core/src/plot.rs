//! SVG projections of trajectory samples.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::dynamics::Sample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    Xy,
    Xz,
    Yz,
    Isometric,
}

impl FromStr for Projection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "xy" => Projection::Xy,
            "xz" => Projection::Xz,
            "yz" => Projection::Yz,
            "3d-isometric" => Projection::Isometric,
            other => return Err(format!("unknown projection {other:?}")),
        })
    }
}

impl Projection {
    pub fn project(self, x: &[f64; 3]) -> (f64, f64) {
        match self {
            Projection::Xy => (x[0], x[1]),
            Projection::Xz => (x[0], x[2]),
            Projection::Yz => (x[1], x[2]),
            Projection::Isometric => {
                let c = 30f64.to_radians().cos();
                let s = 0.5;
                ((x[0] - x[1]) * c, x[2] + (x[0] + x[1]) * s)
            }
        }
    }

    fn axis_labels(self) -> (&'static str, &'static str) {
        match self {
            Projection::Xy => ("x1", "x2"),
            Projection::Xz => ("x1", "x3"),
            Projection::Yz => ("x2", "x3"),
            Projection::Isometric => ("(x1-x2)cos30", "x3+(x1+x2)/2"),
        }
    }
}

const SIZE: f64 = 640.0;
const MARGIN: f64 = 60.0;

/// Projected polyline with a frame, tick labels and axis names.
pub fn render_svg(samples: &[Sample], proj: Projection) -> Result<String> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples to plot".into()));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| proj.project(&s.x)).collect();
    if pts.iter().any(|(a, b)| !(a.is_finite() && b.is_finite())) {
        return Err(Error::InvalidParameter("non-finite coordinates".into()));
    }
    let range = |vals: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
            (l.min(v), h.max(v))
        });
        let pad = if hi - lo < 1e-12 {
            1.0
        } else {
            0.05 * (hi - lo)
        };
        (lo - pad, hi + pad)
    };
    let (umin, umax) = range(&mut pts.iter().map(|p| p.0));
    let (vmin, vmax) = range(&mut pts.iter().map(|p| p.1));
    // One scale for both axes keeps circles round.
    let span = (umax - umin).max(vmax - vmin);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let (uc, vc) = (0.5 * (umin + umax), 0.5 * (vmin + vmax));
    let to_px = |u: f64, v: f64| (SIZE / 2.0 + (u - uc) * scale, SIZE / 2.0 - (v - vc) * scale);
    let (lo_u, hi_u) = (uc - span / 2.0, uc + span / 2.0);
    let (lo_v, hi_v) = (vc - span / 2.0, vc + span / 2.0);
    let (xlab, ylab) = proj.axis_labels();

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0) = to_px(lo_u, lo_v);
    let (x1, y1) = to_px(hi_u, hi_v);
    let _ = writeln!(
        svg,
        r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="black" stroke-width="1"/>"#,
        x0,
        y1,
        x1 - x0,
        y0 - y1
    );
    for (u, anchor) in [(lo_u, "start"), (hi_u, "end")] {
        let (px, _) = to_px(u, lo_v);
        let _ = writeln!(
            svg,
            r#"<text x="{px:.3}" y="{:.3}" font-size="12" text-anchor="{anchor}">{u:.4}</text>"#,
            y0 + 16.0
        );
    }
    for v in [lo_v, hi_v] {
        let (_, py) = to_px(lo_u, v);
        let _ = writeln!(
            svg,
            r#"<text x="{:.3}" y="{py:.3}" font-size="12" text-anchor="end">{v:.4}</text>"#,
            x0 - 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.3}" y="{:.3}" font-size="13" text-anchor="middle">{xlab}</text>"#,
        SIZE / 2.0,
        SIZE - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.3}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.3})">{ylab}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    let mut points = String::new();
    for (i, &(u, v)) in pts.iter().enumerate() {
        let (px, py) = to_px(u, v);
        if i > 0 {
            points.push(' ');
        }
        let _ = write!(points, "{px:.3},{py:.3}");
    }
    let _ = writeln!(
        svg,
        r#"<polyline points="{points}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}
