//! Minimal deterministic SVG plots on a fixed 800×600 canvas.

use std::fmt::Write as _;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const LEFT: f64 = 90.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 5;
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
        Series {
            name: name.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Plot `log10 |y|` instead of `y`.
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Frame, ticks and axis labels for data ranges `x` and `y`.
fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), x_label: &str, y_label: &str) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        out,
        "<g stroke=\"black\" fill=\"none\"><line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\"/>\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\"/></g>"
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let px = x0 + f * (x1 - x0);
        let py = y0 + f * (y1 - y0);
        let _ = writeln!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{y0}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\
             <text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            y0 + 5.0,
            y0 + 20.0,
            tick_label(x.0 + f * (x.1 - x.0))
        );
        let _ = writeln!(
            out,
            "<line x1=\"{x0}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>\
             <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            tick_label(y.0 + f * (y.1 - y.0))
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">{}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 25.0,
        escape(x_label),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

/// Range padded so that a constant series still spans a band.
fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        let pad = 0.5 * hi.abs().max(1.0);
        Some((lo - pad, hi + pad))
    } else {
        Some((lo, hi))
    }
}

impl LinePlot {
    pub fn render(&self) -> String {
        let ys = |p: &(f64, f64)| if self.log_y { p.1.abs().log10() } else { p.1 };
        let all = || self.series.iter().flat_map(|s| s.points.iter());
        let xr = range(all().map(|p| p.0)).unwrap_or((0.0, 1.0));
        let yr = range(all().map(ys)).unwrap_or((0.0, 1.0));
        let mut out = String::new();
        header(&mut out, &self.title);
        let y_label = if self.log_y {
            format!("log10 |{}|", self.y_label)
        } else {
            self.y_label.clone()
        };
        axes(&mut out, xr, yr, &self.x_label, &y_label);
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && ys(p).is_finite())
                .map(|p| {
                    let px = x0 + (p.0 - xr.0) / (xr.1 - xr.0) * (x1 - x0);
                    let py = y0 + (ys(p) - yr.0) / (yr.1 - yr.0) * (y1 - y0);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            if !pts.is_empty() {
                let _ = writeln!(
                    out,
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                    pts.join(" ")
                );
            }
            let ly = TOP + 20.0 * k as f64 + 10.0;
            let _ = writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\
                 <text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
                x1 + 15.0,
                x1 + 35.0,
                x1 + 40.0,
                ly + 4.0,
                escape(&s.name)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// `nx × ny` values, `values[i * ny + j]` at column `i`, row `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl Heatmap {
    pub fn from_grid(grid: &crate::field::GridSample, title: impl Into<String>) -> Self {
        let n = grid.resolution();
        let (a, b) = (grid.point(0, 0), grid.point(n - 1, n - 1));
        Heatmap {
            title: title.into(),
            x_label: "q".into(),
            y_label: "p".into(),
            x_range: (a.q, b.q),
            y_range: (a.p, b.p),
            nx: n,
            ny: n,
            values: grid.values().to_vec(),
        }
    }

    /// Cells shaded linearly from black (minimum) to white (maximum).
    pub fn render(&self) -> String {
        let mut out = String::new();
        header(&mut out, &self.title);
        axes(&mut out, self.x_range, self.y_range, &self.x_label, &self.y_label);
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
        if self.nx > 0 && self.ny > 0 {
            let (lo, hi) = range(self.values.iter().copied()).unwrap_or((0.0, 1.0));
            let (w, h) = ((x1 - x0) / self.nx as f64, (y0 - y1) / self.ny as f64);
            out.push_str("<g shape-rendering=\"crispEdges\">\n");
            for i in 0..self.nx {
                for j in 0..self.ny {
                    let v = self.values[i * self.ny + j];
                    let g = if v.is_finite() {
                        (255.0 * (v - lo) / (hi - lo)).round().clamp(0.0, 255.0) as u8
                    } else {
                        0
                    };
                    let _ = writeln!(
                        out,
                        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({g},{g},{g})\"/>",
                        x0 + i as f64 * w,
                        y0 - (j + 1) as f64 * h,
                        w,
                        h
                    );
                }
            }
            out.push_str("</g>\n");
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\">max {}</text><text x=\"{:.2}\" y=\"{:.2}\">min {}</text>",
                x1 + 15.0,
                TOP + 10.0,
                tick_label(hi),
                x1 + 15.0,
                TOP + 30.0,
                tick_label(lo)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample, FieldExpr};

    #[test]
    fn empty_plot_has_axes_only() {
        let svg = LinePlot::default().render();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("viewBox=\"0 0 800 600\""));
        assert!(svg.contains("<line"));
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn two_points_make_one_segment() {
        let plot = LinePlot {
            series: vec![Series::new("a", vec![(0.0, 1.0), (1.0, 2.0)])],
            ..LinePlot::default()
        };
        let svg = plot.render();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split(' ').count(), 2);
        assert_eq!(svg, plot.render());
    }

    #[test]
    fn heatmap_cells_and_shading() {
        let grid = sample(&FieldExpr::sin(1, 0), 64);
        let svg = Heatmap::from_grid(&grid, "sin").render();
        assert_eq!(svg.matches("<rect").count(), 64 * 64 + 1);
        assert!(svg.contains("rgb(255,255,255)"));
        assert!(svg.contains("rgb(0,0,0)"));
    }

    #[test]
    fn labels_are_escaped() {
        let plot = LinePlot {
            title: "a<b & c".into(),
            ..LinePlot::default()
        };
        assert!(plot.render().contains("a&lt;b &amp; c"));
    }
}
