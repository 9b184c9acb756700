//! Minimal self-contained SVG writer for line charts and histograms. The
//! CSV artifacts are the testable outputs; these figures exist for human
//! inspection.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 460.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn from_ranges(xs: impl Iterator<Item = f64>, ys: impl Iterator<Item = f64>) -> Frame {
        let mut f = Frame {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for x in xs {
            f.x_min = f.x_min.min(x);
            f.x_max = f.x_max.max(x);
        }
        for y in ys {
            f.y_min = f.y_min.min(y);
            f.y_max = f.y_max.max(y);
        }
        if f.x_min >= f.x_max {
            f.x_max = f.x_min + 1.0;
        }
        if f.y_min >= f.y_max {
            f.y_max = f.y_min + 1.0;
        }
        f
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min)
            * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM
            - (y - self.y_min) / (self.y_max - self.y_min)
                * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{x}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n",
        x = WIDTH / 2.0
    )
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        out,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>"
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = frame.x_min + t * (frame.x_max - frame.x_min);
        let yv = frame.y_min + t * (frame.y_max - frame.y_min);
        let xp = frame.px(xv);
        let yp = frame.py(yv);
        let _ = writeln!(
            out,
            "<line x1=\"{xp}\" y1=\"{y0}\" x2=\"{xp}\" y2=\"{}\" stroke=\"black\"/>\
             <text x=\"{xp}\" y=\"{}\" text-anchor=\"middle\">{xv:.1}</text>",
            y0 + 5.0,
            y0 + 20.0
        );
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{yp}\" x2=\"{x0}\" y2=\"{yp}\" stroke=\"black\"/>\
             <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{yv:.1}</text>",
            x0 - 5.0,
            x0 - 8.0,
            yp + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{y_label}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

/// Multi-series line chart.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    path: &Path,
) -> Result<()> {
    let frame = Frame::from_ranges(
        series.iter().flat_map(|s| s.points.iter().map(|p| p.0)),
        series.iter().flat_map(|s| s.points.iter().map(|p| p.1)),
    );
    let mut out = header(title);
    axes(&mut out, &frame, x_label, y_label);
    for (i, s) in series.iter().enumerate() {
        let mut d = String::new();
        for (j, (x, y)) in s.points.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.2},{:.2} ",
                if j == 0 { "M " } else { "L " },
                frame.px(*x),
                frame.py(*y)
            );
        }
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\"/>",
            d.trim_end(),
            s.color
        );
        let ly = MARGIN_TOP + 16.0 * i as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"4\" fill=\"{}\"/>\
             <text x=\"{}\" y=\"{}\">{}</text>",
            WIDTH - 170.0,
            ly,
            s.color,
            WIDTH - 152.0,
            ly + 6.0,
            s.label
        );
    }
    out.push_str("</svg>\n");
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Histogram with an optional density overlay (scaled to the bar heights).
pub fn histogram_chart(
    title: &str,
    x_label: &str,
    edges: &[f64],
    counts: &[u64],
    overlay: Option<&[(f64, f64)]>,
    path: &Path,
) -> Result<()> {
    let max_count = counts.iter().copied().max().unwrap_or(1).max(1) as f64;
    let frame = Frame {
        x_min: edges[0],
        x_max: edges[edges.len() - 1],
        y_min: 0.0,
        y_max: max_count,
    };
    let mut out = header(title);
    axes(&mut out, &frame, x_label, "count");
    for (i, &c) in counts.iter().enumerate() {
        let x = frame.px(edges[i]);
        let w = frame.px(edges[i + 1]) - x;
        let y = frame.py(c as f64);
        let h = frame.py(0.0) - y;
        let _ = writeln!(
            out,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" \
             fill=\"steelblue\" stroke=\"white\" stroke-width=\"0.5\"/>"
        );
    }
    if let Some(curve) = overlay {
        let peak = curve
            .iter()
            .map(|p| p.1)
            .fold(f64::NEG_INFINITY, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut d = String::new();
        for (j, (x, dens)) in curve.iter().enumerate() {
            let scaled = dens / peak * max_count;
            let _ = write!(
                d,
                "{}{:.2},{:.2} ",
                if j == 0 { "M " } else { "L " },
                frame.px(*x),
                frame.py(scaled)
            );
        }
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"darkorange\" stroke-width=\"1.5\"/>",
            d.trim_end()
        );
    }
    out.push_str("</svg>\n");
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}
