//! Minimal SVG plots: scatter and line-with-errorbars. Output is plain
//! deterministic text so identical inputs give identical files.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 55.0;

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    /// Symmetric error per point; empty means no bars.
    pub errors: Vec<f64>,
}

struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Axes {
    fn from_series(series: &[Series]) -> Result<Axes> {
        let mut pts = series.iter().flat_map(|s| {
            s.points.iter().enumerate().map(move |(i, &(x, y))| {
                let e = s.errors.get(i).copied().unwrap_or(0.0);
                (x, y - e, y + e)
            })
        });
        let first = pts.next().ok_or_else(|| Error::Data("nothing to plot".into()))?;
        let (mut x0, mut x1) = (first.0, first.0);
        let (mut y0, mut y1) = (first.1, first.2);
        for (x, lo, hi) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(lo);
            y1 = y1.max(hi);
        }
        if x1 == x0 {
            x1 = x0 + 1.0;
        }
        if y1 == y0 {
            y1 = y0 + 1.0;
        }
        let (px, py) = ((x1 - x0) * 0.05, (y1 - y0) * 0.08);
        Ok(Axes {
            x0: x0 - px,
            x1: x1 + px,
            y0: y0 - py,
            y1: y1 + py,
        })
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let sx = MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN);
        let sy = HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN);
        (sx, sy)
    }
}

const COLORS: &[&str] = &["#1f6fb2", "#c23b22", "#2f8f4e", "#8250a0", "#b08000"];

fn header(title: &str, x_label: &str, y_label: &str, axes: &Axes) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        WIDTH, HEIGHT, WIDTH, HEIGHT
    ));
    s.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        WIDTH, HEIGHT
    ));
    s.push_str(&format!(
        "<rect x=\"{m}\" y=\"{m}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"#444\"/>\n",
        m = MARGIN,
        w = WIDTH - 2.0 * MARGIN,
        h = HEIGHT - 2.0 * MARGIN
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 12.0,
        x_label
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y_label
    ));
    // Axis extent labels, fixed precision for determinism.
    let (bx, by) = (MARGIN, HEIGHT - MARGIN + 16.0);
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\">{:.3}</text>\n",
        bx, by, axes.x0
    ));
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{:.3}</text>\n",
        WIDTH - MARGIN,
        by,
        axes.x1
    ));
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{:.3}</text>\n",
        MARGIN - 4.0,
        HEIGHT - MARGIN,
        axes.y0
    ));
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{:.3}</text>\n",
        MARGIN - 4.0,
        MARGIN + 8.0,
        axes.y1
    ));
    s
}

fn legend(series: &[Series]) -> String {
    let mut s = String::new();
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let y = MARGIN + 14.0 + 16.0 * i as f64;
        s.push_str(&format!(
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"4\" fill=\"{}\"/>\n",
            MARGIN + 12.0,
            y - 4.0,
            color
        ));
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            MARGIN + 22.0,
            y,
            ser.label
        ));
    }
    s
}

/// Scatter plot of one or more series.
pub fn scatter_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Result<String> {
    let axes = Axes::from_series(series)?;
    let mut s = header(title, x_label, y_label, &axes);
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        for &(x, y) in &ser.points {
            let (sx, sy) = axes.map(x, y);
            s.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.75\"/>\n",
                sx, sy, color
            ));
        }
    }
    s.push_str(&legend(series));
    s.push_str("</svg>\n");
    Ok(s)
}

/// Connected lines with optional symmetric error bars.
pub fn line_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Result<String> {
    let axes = Axes::from_series(series)?;
    let mut s = header(title, x_label, y_label, &axes);
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = ser
            .points
            .iter()
            .enumerate()
            .map(|(j, &(x, y))| {
                let (sx, sy) = axes.map(x, y);
                format!("{}{:.2},{:.2}", if j == 0 { "M" } else { "L" }, sx, sy)
            })
            .collect();
        s.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            path.join(" "),
            color
        ));
        for (j, &(x, y)) in ser.points.iter().enumerate() {
            let (sx, sy) = axes.map(x, y);
            s.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\"/>\n",
                sx, sy, color
            ));
            if let Some(&e) = ser.errors.get(j) {
                if e > 0.0 {
                    let (_, top) = axes.map(x, y + e);
                    let (_, bot) = axes.map(x, y - e);
                    s.push_str(&format!(
                        "<line x1=\"{sx:.2}\" y1=\"{top:.2}\" x2=\"{sx:.2}\" y2=\"{bot:.2}\" stroke=\"{color}\" stroke-width=\"1\"/>\n"
                    ));
                    for yy in [top, bot] {
                        s.push_str(&format!(
                            "<line x1=\"{:.2}\" y1=\"{yy:.2}\" x2=\"{:.2}\" y2=\"{yy:.2}\" stroke=\"{color}\" stroke-width=\"1\"/>\n",
                            sx - 3.0,
                            sx + 3.0
                        ));
                    }
                }
            }
        }
    }
    s.push_str(&legend(series));
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(svg: &str, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(svg.as_bytes()).map_err(|e| Error::io(path, e))
}
