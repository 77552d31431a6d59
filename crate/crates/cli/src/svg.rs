//! Static SVG plots built directly from computed data.

use std::fmt::Write;

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 360.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;

pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// A polyline; `None` entries break the line.
#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub color: String,
    pub points: Vec<Option<(f64, f64)>>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, color: &str, points: Vec<Option<(f64, f64)>>) -> Self {
        Self {
            label: label.into(),
            color: color.to_string(),
            points,
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

/// One line-chart panel.
#[derive(Clone, Debug, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Shaded `x` intervals.
    pub bands: Vec<(f64, f64)>,
    /// Vertical marker lines.
    pub markers: Vec<f64>,
    /// Fixed `y` range; auto-fit to the series when `None`.
    pub y_range: Option<(f64, f64)>,
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// `[lo, hi]` widened by 5% on each side; degenerate ranges get unit width.
pub fn with_margin(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    if span <= 0.0 {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    (lo - 0.05 * span, hi + 0.05 * span)
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![lo];
    }
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 1e-2 && v.abs() < 1e4 {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.1e}")
    }
}

impl Chart {
    fn x_extent(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.series {
            for &(x, _) in s.points.iter().flatten() {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        (lo, hi)
    }

    fn y_extent(&self) -> (f64, f64) {
        if let Some(r) = self.y_range {
            return r;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.series {
            for &(_, y) in s.points.iter().flatten() {
                if y.is_finite() {
                    lo = lo.min(y);
                    hi = hi.max(y);
                }
            }
        }
        with_margin(lo, hi)
    }

    fn render_into(&self, out: &mut String, oy: f64) {
        let (x0, x1) = {
            let (a, b) = self.x_extent();
            if a.is_finite() {
                (a, b)
            } else {
                (0.0, 1.0)
            }
        };
        let (y0, y1) = self.y_extent();
        let pw = PANEL_W - MARGIN_L - MARGIN_R;
        let ph = PANEL_H - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * pw;
        let sy = |y: f64| oy + MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph;
        let top = oy + MARGIN_T;
        let bottom = oy + MARGIN_T + ph;

        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="15" text-anchor="middle">{}</text>"#,
            num(MARGIN_L + pw / 2.0),
            num(oy + 22.0),
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<defs><clipPath id="clip{}"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath></defs>"#,
            oy as i64,
            num(MARGIN_L),
            num(top),
            num(pw),
            num(ph)
        );
        for &(a, b) in &self.bands {
            let (a, b) = (a.max(x0), b.min(x1));
            if b > a {
                let _ = writeln!(
                    out,
                    r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#f4a582" fill-opacity="0.35"/>"##,
                    num(sx(a)),
                    num(top),
                    num(sx(b) - sx(a)),
                    num(ph)
                );
            }
        }
        for t in nice_ticks(x0, x1, 8) {
            let _ = writeln!(
                out,
                r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#888" stroke-width="1"/><text x="{0}" y="{3}" font-size="11" text-anchor="middle">{4}</text>"##,
                num(sx(t)),
                num(bottom),
                num(bottom + 5.0),
                num(bottom + 18.0),
                tick_label(t)
            );
        }
        for t in nice_ticks(y0, y1, 6) {
            let _ = writeln!(
                out,
                r##"<line x1="{0}" y1="{2}" x2="{1}" y2="{2}" stroke="#eee" stroke-width="1"/><text x="{3}" y="{4}" font-size="11" text-anchor="end">{5}</text>"##,
                num(MARGIN_L),
                num(MARGIN_L + pw),
                num(sy(t)),
                num(MARGIN_L - 6.0),
                num(sy(t) + 4.0),
                tick_label(t)
            );
        }
        if y0 < 0.0 && y1 > 0.0 {
            let _ = writeln!(
                out,
                r##"<line x1="{0}" y1="{2}" x2="{1}" y2="{2}" stroke="#444" stroke-width="0.8"/>"##,
                num(MARGIN_L),
                num(MARGIN_L + pw),
                num(sy(0.0))
            );
        }
        for &m in &self.markers {
            if m >= x0 && m <= x1 {
                let _ = writeln!(
                    out,
                    r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#000" stroke-width="1" stroke-dasharray="4 3"/>"##,
                    num(sx(m)),
                    num(top),
                    num(bottom)
                );
            }
        }
        let _ = writeln!(out, r#"<g clip-path="url(#clip{})">"#, oy as i64);
        for s in &self.series {
            let mut d = String::new();
            let mut pen_up = true;
            for p in &s.points {
                match p {
                    Some((x, y)) if y.is_finite() => {
                        let _ = write!(
                            d,
                            "{}{},{} ",
                            if pen_up { "M" } else { "L" },
                            num(sx(*x)),
                            num(sy(y.clamp(y0 - (y1 - y0), y1 + (y1 - y0))))
                        );
                        pen_up = false;
                    }
                    _ => pen_up = true,
                }
            }
            let dash = if s.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
                d.trim_end(),
                s.color
            );
        }
        let _ = writeln!(out, "</g>");
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#000"/>"##,
            num(MARGIN_L),
            num(top),
            num(pw),
            num(ph)
        );
        for (i, s) in self.series.iter().enumerate() {
            let ly = top + 14.0 + 16.0 * i as f64;
            let lx = MARGIN_L + pw - 150.0;
            let _ = writeln!(
                out,
                r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{3}" stroke-width="2"/><text x="{4}" y="{5}" font-size="11">{6}</text>"#,
                num(lx),
                num(ly),
                num(lx + 20.0),
                s.color,
                num(lx + 26.0),
                num(ly + 4.0),
                escape(&s.label)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            num(MARGIN_L + pw / 2.0),
            num(bottom + 38.0),
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{0}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
            num(top + ph / 2.0),
            escape(&self.y_label)
        );
    }
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        num(width),
        num(height)
    )
}

/// Charts stacked vertically in one document.
pub fn render_charts(charts: &[Chart]) -> String {
    let mut out = header(PANEL_W, PANEL_H * charts.len().max(1) as f64);
    for (i, c) in charts.iter().enumerate() {
        c.render_into(&mut out, PANEL_H * i as f64);
    }
    out.push_str("</svg>\n");
    out
}

/// Diverging blue–white–red colour for `t ∈ [−1, 1]`.
pub fn diverging(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    format!(
        "#{:02x}{:02x}{:02x}",
        r.round() as u8,
        g.round() as u8,
        b.round() as u8
    )
}

/// At most this many heatmap cells per side; finer grids are block-averaged.
const MAX_CELLS: usize = 200;

fn blocks(n: usize) -> Vec<std::ops::Range<usize>> {
    let stride = n.div_ceil(MAX_CELLS).max(1);
    (0..n)
        .step_by(stride)
        .map(|a| a..(a + stride).min(n))
        .collect()
}

/// Heatmap of `values[i * ps.len() + j]` over `xs × ps`, coloured on a scale
/// symmetric about zero.
pub fn heatmap(title: &str, xs: &[f64], ps: &[f64], values: &[f64]) -> String {
    let size = 520.0;
    let (ml, mt, mb, mr) = (70.0, 36.0, 48.0, 90.0);
    let mut out = header(ml + size + mr, mt + size + mb);
    let scale = values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let (p0, p1) = (ps[0], ps[ps.len() - 1]);
    let (bx, by) = (blocks(xs.len()), blocks(ps.len()));
    let cw = size / bx.len() as f64;
    let ch = size / by.len() as f64;
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" font-size="15" text-anchor="middle">{}</text>"#,
        num(ml + size / 2.0),
        escape(title)
    );
    out.push_str("<g shape-rendering=\"crispEdges\">\n");
    for (i, rx) in bx.iter().enumerate() {
        let fills: Vec<String> = by
            .iter()
            .map(|ry| {
                let mut sum = 0.0;
                for a in rx.clone() {
                    for b in ry.clone() {
                        sum += values[a * ps.len() + b];
                    }
                }
                diverging(sum / (rx.len() * ry.len()) as f64 / scale)
            })
            .collect();
        // one rect per run of equal colour along p
        let mut j = 0;
        while j < fills.len() {
            let run = fills[j..].iter().take_while(|f| **f == fills[j]).count();
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                num(ml + i as f64 * cw),
                num(mt + size - (j + run) as f64 * ch),
                num(cw + 0.05),
                num(run as f64 * ch + 0.05),
                fills[j]
            );
            j += run;
        }
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#000"/>"##,
        num(ml),
        num(mt),
        num(size),
        num(size)
    );
    for t in nice_ticks(x0, x1, 8) {
        let px = ml + (t - x0) / (x1 - x0) * size;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            num(px),
            num(mt + size + 16.0),
            tick_label(t)
        );
    }
    for t in nice_ticks(p0, p1, 8) {
        let py = mt + size - (t - p0) / (p1 - p0) * size;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
            num(ml - 6.0),
            num(py + 4.0),
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">x</text><text x="20" y="{}" font-size="12">p</text>"#,
        num(ml + size / 2.0),
        num(mt + size + 38.0),
        num(mt + size / 2.0)
    );
    // colour bar
    let bx = ml + size + 24.0;
    let steps = 64;
    for k in 0..steps {
        let t = 1.0 - 2.0 * (k as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="16" height="{}" fill="{}"/>"#,
            num(bx),
            num(mt + size * k as f64 / steps as f64),
            num(size / steps as f64 + 0.05),
            diverging(t)
        );
    }
    for (t, y) in [(scale, mt), (0.0, mt + size / 2.0), (-scale, mt + size)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="10">{}</text>"#,
            num(bx + 20.0),
            num(y + 4.0),
            tick_label(t)
        );
    }
    out.push_str("</svg>\n");
    out
}
