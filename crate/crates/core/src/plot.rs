//! Minimal deterministic SVG line charts.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 480.0;
/// Plot area inside the canvas: left, top, right, bottom.
pub const PLOT_AREA: (f64, f64, f64, f64) = (70.0, 40.0, 620.0, 420.0);
/// Fraction of the data span added on each side of both axes.
pub const PAD_FRACTION: f64 = 0.05;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.into(), points }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
}

impl AxisRange {
    /// Data min/max widened by [`PAD_FRACTION`] of the span (or of 1 when the
    /// span is zero).
    pub fn padded(lo: f64, hi: f64) -> Self {
        let span = if hi > lo { hi - lo } else { 1.0 };
        Self { min: lo - PAD_FRACTION * span, max: hi + PAD_FRACTION * span }
    }
}

pub fn axis_ranges(series: &[Series]) -> (AxisRange, AxisRange) {
    let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in series.iter().flat_map(|s| s.points.iter()) {
        xs = (xs.0.min(*x), xs.1.max(*x));
        ys = (ys.0.min(*y), ys.1.max(*y));
    }
    (AxisRange::padded(xs.0, xs.1), AxisRange::padded(ys.0, ys.1))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Render line series with a legend and labeled axes.
pub fn render_svg(series: &[Series], title: &str, x_label: &str, y_label: &str) -> Result<String> {
    if series.is_empty() {
        return Err(Error::Plot("no series".into()));
    }
    for s in series {
        if s.points.len() < 2 {
            return Err(Error::Plot(format!("series `{}` has fewer than 2 points", s.name)));
        }
        if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Plot(format!("series `{}` has non-finite points", s.name)));
        }
    }
    let (xr, yr) = axis_ranges(series);
    let (left, top, right, bottom) = PLOT_AREA;
    let px = |x: f64| left + (x - xr.min) / (xr.max - xr.min) * (right - left);
    let py = |y: f64| bottom - (y - yr.min) / (yr.max - yr.min) * (bottom - top);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title)).unwrap();
    writeln!(
        out,
        r#"<g id="plot-area" data-x-min="{}" data-x-max="{}" data-y-min="{}" data-y-max="{}">"#,
        xr.min, xr.max, yr.min, yr.max
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    )
    .unwrap();
    for t in 0..=4 {
        let f = t as f64 / 4.0;
        let xv = xr.min + f * (xr.max - xr.min);
        let yv = yr.min + f * (yr.max - yr.min);
        let (x, y) = (px(xv), py(yv));
        writeln!(out, r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="black"/>"#, bottom + 5.0).unwrap();
        writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, bottom + 18.0, tick_label(xv)).unwrap();
        writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/>"#, left - 5.0).unwrap();
        writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, left - 8.0, y + 4.0, tick_label(yv)).unwrap();
    }
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y))).collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" data-series="{}" points="{}"/>"#,
            escape(&s.name),
            pts.join(" ")
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (left + right) / 2.0, HEIGHT - 22.0, escape(x_label)).unwrap();
    writeln!(
        out,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (top + bottom) / 2.0,
        escape(y_label)
    )
    .unwrap();
    writeln!(out, r#"<g id="legend">"#).unwrap();
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let y = top + 14.0 + 16.0 * k as f64;
        let x = right - 150.0;
        writeln!(out, r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/>"#, x + 20.0).unwrap();
        writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, x + 26.0, y + 4.0, escape(&s.name)).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_svg(series: &[Series], title: &str, x_label: &str, y_label: &str, path: &Path) -> Result<()> {
    let svg = render_svg(series, title, x_label, y_label)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
