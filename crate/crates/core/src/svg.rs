use crate::curve::{Curve, Histogram};
use crate::io::{Metadata, TOOL_NAME, TOOL_VERSION};

pub const DEFAULT_WIDTH: u32 = 800;
pub const DEFAULT_HEIGHT: u32 = 500;

const MARGIN_LEFT: f64 = 62.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 42.0;
const PALETTE: [&str; 4] = ["#1f6fb4", "#d62728", "#2ca02c", "#9467bd"];

/// A plain line plot: polylines over an optional histogram, with axes and
/// numeric tick labels. Everything is emitted as self-contained SVG text.
#[derive(Debug, Clone)]
pub struct Plot {
    width: u32,
    height: u32,
    series: Vec<(String, Vec<(f64, f64)>)>,
    bars: Vec<(f64, f64, f64)>,
    vlines: Vec<(f64, f64)>,
    comments: Vec<String>,
}

impl Plot {
    pub fn new(width: u32, height: u32) -> Plot {
        Plot {
            width: width.max(100),
            height: height.max(100),
            series: Vec::new(),
            bars: Vec::new(),
            vlines: Vec::new(),
            comments: Vec::new(),
        }
    }

    pub fn metadata(mut self, meta: &Metadata) -> Plot {
        // render() already opens with the tool banner; keep the rest
        self.comments.extend(meta.comment_lines().into_iter().skip(1));
        self
    }

    /// Adds a polyline through the given data points.
    pub fn line(mut self, label: impl Into<String>, points: Vec<(f64, f64)>) -> Plot {
        self.series.push((label.into(), points));
        self
    }

    /// Adds the exact graph of a curve: its breakpoint polyline plus one
    /// vertical line per spike.
    pub fn curve(mut self, label: impl Into<String>, curve: &Curve) -> Plot {
        let points = curve
            .breakpoints()
            .iter()
            .copied()
            .zip(curve.values().iter().copied())
            .collect();
        for &(x, weight) in curve.spikes() {
            self.vlines.push((x, curve.evaluate(x)));
            let _ = weight;
        }
        self.series.push((label.into(), points));
        self
    }

    /// Adds histogram rectangles drawn behind the lines, bar heights in data
    /// units (e.g. densities).
    pub fn histogram(mut self, hist: &Histogram, heights: &[f64]) -> Plot {
        let edges = hist.edges();
        for (i, &h) in heights.iter().enumerate() {
            self.bars.push((edges[i], edges[i + 1], h));
        }
        self
    }

    fn data_bounds(&self) -> ((f64, f64), (f64, f64)) {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = vec![0.0];
        for (_, points) in &self.series {
            for &(x, y) in points {
                xs.push(x);
                ys.push(y);
            }
        }
        for &(lo, hi, h) in &self.bars {
            xs.push(lo);
            xs.push(hi);
            ys.push(h);
        }
        for &(x, top) in &self.vlines {
            xs.push(x);
            ys.push(top);
        }
        let (mut x_lo, mut x_hi) = xs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let (y_lo, mut y_hi) = ys
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if !x_lo.is_finite() || x_lo == x_hi {
            let c = if x_lo.is_finite() { x_lo } else { 0.0 };
            x_lo = c - 1.0;
            x_hi = c + 1.0;
        }
        if y_lo == y_hi {
            y_hi = y_lo + 1.0;
        }
        ((x_lo, x_hi), (y_lo, y_hi))
    }

    pub fn render(&self) -> String {
        let ((x_lo, x_hi), (y_lo, y_hi)) = self.data_bounds();
        let w = self.width as f64;
        let h = self.height as f64;
        let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
        let px = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
        let py = |y: f64| MARGIN_TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h;

        let mut out = String::new();
        out.push_str(&format!("<!-- {TOOL_NAME} {TOOL_VERSION} -->\n"));
        for line in &self.comments {
            out.push_str(&format!("<!-- {} -->\n", escape(line)));
        }
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" \
             viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
            self.width, self.height
        ));
        out.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
            self.width, self.height
        ));

        for &(lo, hi, height) in &self.bars {
            let x = px(lo);
            let y = py(height);
            out.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" \
                 fill=\"#d4d4d4\" stroke=\"#8a8a8a\" stroke-width=\"1\"/>\n",
                num(x),
                num(y),
                num(px(hi) - x),
                num(py(y_lo) - y)
            ));
        }

        // axes
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000\"/>\n",
            num(MARGIN_LEFT),
            num(py(y_lo)),
            num(w - MARGIN_RIGHT)
        ));
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000\"/>\n",
            num(MARGIN_LEFT),
            num(MARGIN_TOP),
            num(py(y_lo))
        ));
        for tick in ticks(x_lo, x_hi) {
            let x = px(tick);
            out.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000\"/>\n",
                num(x),
                num(py(y_lo)),
                num(py(y_lo) + 5.0)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                num(x),
                num(py(y_lo) + 18.0),
                num(tick)
            ));
        }
        for tick in ticks(y_lo, y_hi) {
            let y = py(tick);
            out.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000\"/>\n",
                num(MARGIN_LEFT - 5.0),
                num(y),
                num(MARGIN_LEFT)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
                num(MARGIN_LEFT - 8.0),
                num(y + 4.0),
                num(tick)
            ));
        }

        for (i, &(x, top)) in self.vlines.iter().enumerate() {
            let color = PALETTE[(self.series.len() + i) % PALETTE.len()];
            out.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\" \
                 stroke-width=\"2\" stroke-dasharray=\"4 3\"/>\n",
                num(px(x)),
                num(py(y_lo.max(0.0))),
                num(py(top)),
                color
            ));
        }

        for (i, (label, points)) in self.series.iter().enumerate() {
            if points.is_empty() {
                continue;
            }
            let color = PALETTE[i % PALETTE.len()];
            let coords = points
                .iter()
                .map(|&(x, y)| format!("{},{}", num(px(x)), num(py(y))))
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&format!(
                "<polyline points=\"{coords}\" fill=\"none\" stroke=\"{color}\" \
                 stroke-width=\"2\"/>\n"
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" fill=\"{color}\" text-anchor=\"end\">{}</text>\n",
                num(w - MARGIN_RIGHT - 4.0),
                num(MARGIN_TOP + 14.0 * (i as f64 + 1.0)),
                escape(label)
            ));
        }

        out.push_str("</svg>\n");
        out
    }
}

/// Round tick positions covering [lo, hi] with a 1/2/5 step.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let range = hi - lo;
    let raw = range / 6.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let normalized = raw / magnitude;
    let step = if normalized <= 1.0 {
        magnitude
    } else if normalized <= 2.0 {
        2.0 * magnitude
    } else if normalized <= 5.0 {
        5.0 * magnitude
    } else {
        10.0 * magnitude
    };
    let mut ticks = Vec::new();
    let mut k = (lo / step).ceil() as i64;
    while (k as f64) * step <= hi + step * 1e-9 {
        ticks.push(k as f64 * step);
        k += 1;
    }
    ticks
}

/// Fixed-precision number formatting so the output is diffable: up to six
/// decimals, trailing zeros trimmed.
fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
