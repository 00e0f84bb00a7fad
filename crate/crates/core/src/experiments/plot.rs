//! Static SVG line charts of the series columns.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::series::SeriesTable;
use crate::error::Result;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const PAD: f64 = 56.0;

/// A single-series line chart.
pub fn line_chart_svg(title: &str, xs: &[f64], ys: &[f64]) -> String {
    let finite = |v: &&f64| v.is_finite();
    let (x0, x1) = bounds(xs.iter().filter(finite));
    let (mut y0, mut y1) = bounds(ys.iter().filter(finite));
    if y1 - y0 <= f64::EPSILON * y1.abs().max(1e-300) {
        let pad = y0.abs().max(1.0) * 0.5;
        y0 -= pad;
        y1 += pad;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * (WIDTH - 2.0 * PAD);
    let sy = |y: f64| HEIGHT - PAD - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * PAD);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * PAD,
        HEIGHT - 2.0 * PAD
    );
    let _ = writeln!(svg, r#"<text x="{PAD}" y="{}" text-anchor="middle">{x0:.3}</text>"#, HEIGHT - PAD + 16.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{x1:.3}</text>"#, WIDTH - PAD, HEIGHT - PAD + 16.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{y0:.3e}</text>"#, PAD - 4.0, HEIGHT - PAD);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{y1:.3e}</text>"#, PAD - 4.0, PAD + 4.0);
    let points: Vec<String> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(svg, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#, points.join(" "));
    svg.push_str("</svg>\n");
    svg
}

fn bounds<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `plots/<column>.svg` for every column of `series.csv` except t.
pub fn plot_run(run_dir: &Path) -> Result<Vec<PathBuf>> {
    let table = SeriesTable::read(&run_dir.join("series.csv"))?;
    let dir = run_dir.join("plots");
    std::fs::create_dir_all(&dir)?;
    let times = table.times().to_vec();
    let mut written = Vec::new();
    for (name, values) in table.columns.iter().zip(&table.data) {
        if name == "t" {
            continue;
        }
        let file = dir.join(format!("{}.svg", name.replace('+', "plus").replace('-', "minus")));
        std::fs::write(&file, line_chart_svg(name, &times, values))?;
        written.push(file);
    }
    Ok(written)
}
