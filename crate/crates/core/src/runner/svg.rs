use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::perturbation::ExperimentReport;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    /// Log10 range of the positive finite values, padded by 5%.
    fn fit(values: &[f64]) -> Self {
        let logs: Vec<f64> = values.iter().map(|v| v.log10()).collect();
        let (mut lo, mut hi) = logs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Self { lo: lo - pad, hi: hi + pad }
    }

    fn unit(&self, log_value: f64) -> f64 {
        (log_value - self.lo) / (self.hi - self.lo)
    }

    fn decades(&self) -> Vec<i32> {
        (self.lo.ceil() as i32..=self.hi.floor() as i32).collect()
    }
}

fn px(x: f64) -> f64 {
    LEFT + x * (WIDTH - LEFT - RIGHT)
}

fn py(y: f64) -> f64 {
    HEIGHT - BOTTOM - y * (HEIGHT - TOP - BOTTOM)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Log-log scatter of the report's plot columns, with a guide line of the
/// plot slope through the log-space centroid. Non-positive points are
/// omitted.
pub fn render_svg(report: &ExperimentReport) -> Result<String> {
    let plot = report
        .plot
        .as_ref()
        .ok_or_else(|| Error::MissingPlotColumns(format!("{} has no designated plot columns", report.id)))?;
    let (xs, ys) = match (report.column(&plot.x), report.column(&plot.y)) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            return Err(Error::MissingPlotColumns(format!(
                "{} lacks column `{}` or `{}`",
                report.id, plot.x, plot.y
            )))
        }
    };
    let points: Vec<(f64, f64)> = xs
        .into_iter()
        .zip(ys)
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .collect();
    let px_vals: Vec<f64> = points.iter().map(|p| p.0).collect();
    let py_vals: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (ax, ay) = (Axis::fit(&px_vals), Axis::fit(&py_vals));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot-area"><rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}"/></clipPath></defs>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="30" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(&report.id)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    for d in ax.decades() {
        let x = px(ax.unit(d as f64));
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"##,
            HEIGHT - BOTTOM,
            HEIGHT - BOTTOM + 18.0
        );
    }
    for d in ay.decades() {
        let y = py(ay.unit(d as f64));
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
            WIDTH - RIGHT,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 20.0,
        escape(&plot.x)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        escape(&plot.y)
    );

    let _ = writeln!(s, r##"<g class="series" fill="#1f77b4" clip-path="url(#plot-area)">"##);
    for (x, y) in &points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#,
            px(ax.unit(x.log10())),
            py(ay.unit(y.log10()))
        );
    }
    let _ = writeln!(s, "</g>");

    if let (Some(slope), false) = (plot.slope, points.is_empty()) {
        let n = points.len() as f64;
        let cx = points.iter().map(|p| p.0.log10()).sum::<f64>() / n;
        let cy = points.iter().map(|p| p.1.log10()).sum::<f64>() / n;
        let line_y = |lx: f64| cy + slope * (lx - cx);
        let _ = writeln!(
            s,
            r##"<line class="guide" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#d62728" stroke-dasharray="6 4" clip-path="url(#plot-area)"/>"##,
            px(0.0),
            py(ay.unit(line_y(ax.lo))),
            px(1.0),
            py(ay.unit(line_y(ax.hi)))
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="#d62728">slope {slope}</text>"##,
            WIDTH - RIGHT - 8.0,
            TOP + 18.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
