//! SVG rendering of a solved instance: disks, the closed tour, the chosen
//! points and circle labels. Output text is deterministic.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::model::{ContinuousSolution, Instance};

#[derive(Debug, Clone, PartialEq)]
pub struct RenderStyle {
    /// Width and height of the square canvas in pixels.
    pub canvas_px: u32,
    /// Blank border on each side, as a fraction of the canvas.
    pub margin_frac: f64,
    pub circle_stroke: f64,
    pub circle_color: String,
    pub tour_stroke: f64,
    pub tour_color: String,
    pub point_radius: f64,
    pub point_color: String,
    pub label_size: f64,
    pub label_color: String,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            canvas_px: 800,
            margin_frac: 0.05,
            circle_stroke: 1.5,
            circle_color: "#1f77b4".into(),
            tour_stroke: 1.5,
            tour_color: "#d62728".into(),
            point_radius: 3.0,
            point_color: "#000000".into(),
            label_size: 12.0,
            label_color: "#555555".into(),
        }
    }
}

impl RenderStyle {
    pub fn validate(&self) -> Result<()> {
        if self.canvas_px == 0 {
            return Err(Error::InvalidConfig("canvas_px must be > 0".into()));
        }
        if !(0.0..0.5).contains(&self.margin_frac) {
            return Err(Error::InvalidConfig(
                "margin_frac must lie in [0, 0.5)".into(),
            ));
        }
        Ok(())
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Plane-to-canvas mapping; +y points up in the plane and down on the canvas.
struct Frame {
    xmin: f64,
    ymax: f64,
    scale: f64,
    pad_x: f64,
    pad_y: f64,
}

impl Frame {
    fn fit(instance: &Instance, solution: &ContinuousSolution, style: &RenderStyle) -> Self {
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for c in &instance.circles {
            xmin = xmin.min(c.center_x - c.radius);
            xmax = xmax.max(c.center_x + c.radius);
            ymin = ymin.min(c.center_y - c.radius);
            ymax = ymax.max(c.center_y + c.radius);
        }
        for p in &solution.points {
            xmin = xmin.min(p.x);
            xmax = xmax.max(p.x);
            ymin = ymin.min(p.y);
            ymax = ymax.max(p.y);
        }
        let canvas = style.canvas_px as f64;
        let inner = canvas * (1.0 - 2.0 * style.margin_frac);
        let extent = (xmax - xmin).max(ymax - ymin);
        let scale = if extent > 0.0 { inner / extent } else { 1.0 };
        let margin = canvas * style.margin_frac;
        Frame {
            xmin,
            ymax,
            scale,
            pad_x: margin + (inner - (xmax - xmin) * scale) / 2.0,
            pad_y: margin + (inner - (ymax - ymin) * scale) / 2.0,
        }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        (
            self.pad_x + (p.x - self.xmin) * self.scale,
            self.pad_y + (self.ymax - p.y) * self.scale,
        )
    }
}

pub fn render_svg(
    instance: &Instance,
    solution: &ContinuousSolution,
    style: &RenderStyle,
) -> Result<String> {
    style.validate()?;
    let n = instance.len();
    if solution.points.len() != n
        || solution.order.len() != n
        || solution.order.iter().any(|&c| c >= n)
    {
        return Err(Error::Contract(format!(
            "solution does not match the {n}-circle instance"
        )));
    }
    let frame = Frame::fit(instance, solution, style);
    let size = style.canvas_px;

    let mut svg = String::new();
    // write! into a String cannot fail
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let title = instance.name.as_deref().unwrap_or("tour");
    let _ = writeln!(
        svg,
        "<title>{} ({} circles, length {:.6})</title>",
        escape(title),
        n,
        solution.total
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>"#
    );

    let _ = writeln!(
        svg,
        r#"<g class="regions" fill="none" stroke="{}" stroke-width="{:.3}">"#,
        style.circle_color, style.circle_stroke
    );
    for c in &instance.circles {
        let (x, y) = frame.map(c.center());
        let _ = writeln!(
            svg,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}"/>"#,
            c.radius * frame.scale
        );
    }
    let _ = writeln!(svg, "</g>");

    let mut d = String::new();
    for (i, &c) in solution.order.iter().enumerate() {
        let (x, y) = frame.map(solution.points[c]);
        let _ = write!(d, "{}{x:.3} {y:.3} ", if i == 0 { "M" } else { "L" });
    }
    d.push('Z');
    let _ = writeln!(
        svg,
        r#"<path class="tour" d="{d}" fill="none" stroke="{}" stroke-width="{:.3}" stroke-linejoin="round"/>"#,
        style.tour_color, style.tour_stroke
    );

    let _ = writeln!(svg, r#"<g class="points" fill="{}">"#, style.point_color);
    for p in &solution.points {
        let (x, y) = frame.map(*p);
        let _ = writeln!(
            svg,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}"/>"#,
            style.point_radius
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(
        svg,
        r#"<g class="labels" fill="{}" font-family="sans-serif" font-size="{:.1}" text-anchor="middle">"#,
        style.label_color, style.label_size
    );
    for (i, c) in instance.circles.iter().enumerate() {
        let (x, y) = frame.map(c.center());
        let _ = writeln!(
            svg,
            r#"<text x="{x:.3}" y="{:.3}">{i}</text>"#,
            y + style.label_size / 3.0
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}
