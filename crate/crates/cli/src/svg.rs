//! Standalone SVG 1.1 charts. Output depends only on the input numbers, so
//! figures can be compared byte for byte.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Tick label with no trailing zeros.
fn tick_label(x: f64) -> String {
    let s = format!("{:.6}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Step from {1, 2, 5} x 10^k giving about `target` intervals over `span`.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    step: f64,
}

impl Axis {
    /// Covers `[min, max]` with nice rounded bounds.
    fn covering(min: f64, max: f64) -> Axis {
        let (mut min, mut max) = if min.is_finite() && max.is_finite() { (min, max) } else { (0.0, 1.0) };
        if max - min < 1e-12 {
            min -= 0.5;
            max += 0.5;
        }
        let step = nice_step(max - min, 5.0);
        Axis {
            lo: (min / step).floor() * step,
            hi: (max / step).ceil() * step,
            step,
        }
    }

    fn ticks(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step).round() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

struct Canvas {
    out: String,
    x: Axis,
    y: Axis,
}

impl Canvas {
    fn new(title: &str, x: Axis, y: Axis) -> Canvas {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
        out.push_str(
            "<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" \"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n",
        );
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>");
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
            WIDTH / 2.0,
            escape(title)
        );
        Canvas { out, x, y }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.lo) / (self.x.hi - self.x.lo) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.lo) / (self.y.hi - self.y.lo) * (HEIGHT - TOP - BOTTOM)
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, style: &str) {
        let _ = writeln!(
            self.out,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" {style}/>"
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.out,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"{anchor}\">{}</text>",
            escape(s)
        );
    }

    fn y_axis(&mut self, label: &str, grid: bool) {
        let (x0, x1) = (LEFT, WIDTH - RIGHT);
        for t in self.y.ticks() {
            let y = self.py(t);
            if grid {
                self.line(x0, y, x1, y, "stroke=\"#dddddd\" stroke-width=\"1\"");
            }
            self.line(x0 - 5.0, y, x0, y, "stroke=\"#000000\" stroke-width=\"1\"");
            self.text(x0 - 8.0, y + 4.0, "end", &tick_label(t));
        }
        self.line(x0, self.py(self.y.lo), x0, self.py(self.y.hi), "stroke=\"#000000\" stroke-width=\"1\"");
        let cy = (TOP + HEIGHT - BOTTOM) / 2.0;
        let _ = writeln!(
            self.out,
            "<text x=\"18\" y=\"{cy:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {cy:.2})\">{}</text>",
            escape(label)
        );
    }

    fn x_baseline(&mut self, label: &str) {
        let y = HEIGHT - BOTTOM;
        self.line(LEFT, y, WIDTH - RIGHT, y, "stroke=\"#000000\" stroke-width=\"1\"");
        self.text((LEFT + WIDTH - RIGHT) / 2.0, HEIGHT - 15.0, "middle", label);
    }

    fn numeric_x_axis(&mut self, label: &str) {
        for t in self.x.ticks() {
            let x = self.px(t);
            let y = HEIGHT - BOTTOM;
            self.line(x, y, x, y + 5.0, "stroke=\"#000000\" stroke-width=\"1\"");
            self.text(x, y + 18.0, "middle", &tick_label(t));
        }
        self.x_baseline(label);
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bar {
    pub label: String,
    pub value: f64,
    /// Lower and upper whisker ends.
    pub whisker: Option<(f64, f64)>,
    /// Drawn in the accent color.
    pub accent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub bars: Vec<Bar>,
}

impl BarChart {
    pub fn render(&self) -> String {
        let top = self
            .bars
            .iter()
            .map(|b| b.whisker.map_or(b.value, |(_, hi)| hi.max(b.value)))
            .fold(0.0, f64::max);
        let bottom = self
            .bars
            .iter()
            .map(|b| b.whisker.map_or(b.value, |(lo, _)| lo.min(b.value)))
            .fold(0.0, f64::min);
        let n = self.bars.len().max(1) as f64;
        let mut c = Canvas::new(&self.title, Axis { lo: 0.0, hi: n, step: 1.0 }, Axis::covering(bottom, top));
        c.y_axis(&self.y_label, true);
        let slot = (WIDTH - LEFT - RIGHT) / n;
        let zero = c.py(0.0);
        for (i, b) in self.bars.iter().enumerate() {
            let x = LEFT + slot * (i as f64 + 0.2);
            let w = slot * 0.6;
            let y = c.py(b.value);
            let (y0, h) = if y < zero { (y, zero - y) } else { (zero, y - zero) };
            let fill = if b.accent { PALETTE[1] } else { PALETTE[0] };
            let _ = writeln!(
                c.out,
                "<rect x=\"{x:.2}\" y=\"{y0:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\"/>"
            );
            let cx = x + w / 2.0;
            if let Some((lo, hi)) = b.whisker {
                let (ylo, yhi) = (c.py(lo), c.py(hi));
                let style = "stroke=\"#000000\" stroke-width=\"1.5\"";
                c.line(cx, ylo, cx, yhi, style);
                c.line(cx - w / 4.0, ylo, cx + w / 4.0, ylo, style);
                c.line(cx - w / 4.0, yhi, cx + w / 4.0, yhi, style);
            }
            c.text(cx, HEIGHT - BOTTOM + 18.0, "middle", &b.label);
        }
        c.x_baseline(&self.x_label);
        c.finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

/// One line per series over shared categorical x positions.
#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub categories: Vec<String>,
    pub series: Vec<Series>,
}

impl LineChart {
    pub fn render(&self) -> String {
        let all = self.series.iter().flat_map(|s| s.values.iter().copied());
        let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let n = self.categories.len().max(1) as f64;
        let mut c = Canvas::new(&self.title, Axis { lo: 0.0, hi: n, step: 1.0 }, Axis::covering(lo, hi));
        c.y_axis(&self.y_label, true);
        let slot = (WIDTH - LEFT - RIGHT) / n;
        let x_at = |i: usize| LEFT + slot * (i as f64 + 0.5);
        for (i, cat) in self.categories.iter().enumerate() {
            c.text(x_at(i), HEIGHT - BOTTOM + 18.0, "middle", cat);
        }
        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let points: Vec<String> = s
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| format!("{:.2},{:.2}", x_at(i), c.py(*v)))
                .collect();
            let _ = writeln!(
                c.out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>",
                points.join(" ")
            );
            for (i, v) in s.values.iter().enumerate() {
                let _ = writeln!(
                    c.out,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>",
                    x_at(i),
                    c.py(*v)
                );
            }
            let ly = TOP + 8.0 + 16.0 * k as f64;
            let lx = WIDTH - RIGHT - 150.0;
            c.line(lx, ly, lx + 20.0, ly, &format!("stroke=\"{color}\" stroke-width=\"2\""));
            c.text(lx + 26.0, ly + 4.0, "start", &s.name);
        }
        c.x_baseline(&self.x_label);
        c.finish()
    }
}

/// Autocorrelation stems for lags 1..=n with a symmetric significance band.
#[derive(Debug, Clone, PartialEq)]
pub struct StemPlot {
    pub title: String,
    /// Coefficient at lag `i + 1`.
    pub values: Vec<f64>,
    pub bound: f64,
}

impl StemPlot {
    pub fn render(&self) -> String {
        let n = self.values.len().max(1) as f64;
        let lo = self.values.iter().copied().fold(-self.bound, f64::min);
        let hi = self.values.iter().copied().fold(self.bound, f64::max);
        let mut c = Canvas::new(&self.title, Axis::covering(0.0, n), Axis::covering(lo, hi));
        c.y_axis("Autocorrelation", false);
        let (x0, x1) = (c.px(0.0), c.px(c.x.hi));
        let zero = c.py(0.0);
        c.line(x0, zero, x1, zero, "stroke=\"#000000\" stroke-width=\"1\"");
        for b in [self.bound, -self.bound] {
            let y = c.py(b);
            c.line(x0, y, x1, y, &format!("stroke=\"{}\" stroke-width=\"1\" stroke-dasharray=\"4,3\"", PALETTE[0]));
        }
        for (i, v) in self.values.iter().enumerate() {
            let x = c.px(i as f64 + 1.0);
            let y = c.py(*v);
            let color = if v.abs() > self.bound { PALETTE[1] } else { "#000000" };
            c.line(x, zero, x, y, &format!("stroke=\"{color}\" stroke-width=\"1\""));
            let _ = writeln!(c.out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2\" fill=\"{color}\"/>");
        }
        c.numeric_x_axis("Lag");
        c.finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl ScatterPlot {
    pub fn render(&self) -> String {
        let fold = |f: fn(&(f64, f64)) -> f64| {
            self.points
                .iter()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
        };
        let (xlo, xhi) = fold(|p| p.0);
        let (ylo, yhi) = fold(|p| p.1);
        let mut c = Canvas::new(&self.title, Axis::covering(xlo, xhi), Axis::covering(ylo, yhi));
        c.y_axis(&self.y_label, true);
        for &(x, y) in &self.points {
            let _ = writeln!(
                c.out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\" fill-opacity=\"0.6\"/>",
                c.px(x),
                c.py(y),
                PALETTE[0]
            );
        }
        c.numeric_x_axis(&self.x_label);
        c.finish()
    }
}
