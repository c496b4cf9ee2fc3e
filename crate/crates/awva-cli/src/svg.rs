//! Static SVG plots: line series and error-bar series with axes and legend.
//!
//! Output is a pure function of the input, so identical inputs produce
//! byte-identical files.

use std::path::Path;

use crate::errors::{CliError, CliResult};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 56.0;

const PALETTE: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
];

/// What to draw for each series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Polyline through the points.
    Lines,
    /// Markers with vertical error bars (`y_err` taken as ± half-length).
    ErrorBars,
}

/// One plotted series.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Per-point symmetric error; required for [`PlotKind::ErrorBars`].
    pub y_err: Option<Vec<f64>>,
}

impl Series {
    pub fn lines(name: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { name: name.to_string(), x, y, y_err: None }
    }

    pub fn error_bars(name: &str, x: Vec<f64>, y: Vec<f64>, y_err: Vec<f64>) -> Self {
        Self { name: name.to_string(), x, y, y_err: Some(y_err) }
    }
}

/// Labels around the plot area.
#[derive(Debug, Clone, Default)]
pub struct PlotLabels {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.abs().log10().floor());
    let frac = raw / mag;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(min: f64, max: f64) -> Vec<f64> {
    if max.is_nan() || min.is_nan() || max <= min {
        return vec![min];
    }
    let step = nice_step((max - min) / 5.0);
    let mut t = (min / step).ceil() * step;
    let mut out = Vec::new();
    while t <= max + 1e-9 * step {
        // snap near-zero ticks produced by rounding
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v}");
        if s.len() > 8 {
            format!("{v:.4}")
        } else {
            s
        }
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render series to an SVG document.
pub fn render_svg_string(series: &[Series], kind: PlotKind, labels: &PlotLabels) -> CliResult<String> {
    if series.is_empty() || series.iter().any(|s| s.x.is_empty()) {
        return Err(CliError::Config("plot needs at least one nonempty series".into()));
    }
    for s in series {
        if s.x.len() != s.y.len() {
            return Err(CliError::Config(format!("series `{}` has mismatched x/y lengths", s.name)));
        }
        if kind == PlotKind::ErrorBars {
            match &s.y_err {
                Some(e) if e.len() == s.y.len() => {}
                _ => {
                    return Err(CliError::Config(format!(
                        "error-bar series `{}` needs matching y_err values",
                        s.name
                    )))
                }
            }
        }
    }

    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for (i, (&x, &y)) in s.x.iter().zip(s.y.iter()).enumerate() {
            let e = s.y_err.as_ref().map(|e| e[i]).unwrap_or(0.0).abs();
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y - e);
            y_max = y_max.max(y + e);
        }
    }
    if x_max == x_min {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max == y_min {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let x_pad = 0.03 * (x_max - x_min);
    let y_pad = 0.06 * (y_max - y_min);
    let (x_lo, x_hi) = (x_min - x_pad, x_max + x_pad);
    let (y_lo, y_hi) = (y_min - y_pad, y_max + y_pad);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(&labels.title)
    ));

    // grid lines and tick labels
    for t in ticks(x_lo, x_hi) {
        let x = px(t);
        svg.push_str(&format!(
            "<line class=\"grid\" x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            MARGIN_TOP,
            MARGIN_TOP + plot_h
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            MARGIN_TOP + plot_h + 18.0,
            fmt_tick(t)
        ));
    }
    for t in ticks(y_lo, y_hi) {
        let y = py(t);
        svg.push_str(&format!(
            "<line class=\"grid\" x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            MARGIN_LEFT - 6.0,
            y + 4.0,
            fmt_tick(t)
        ));
    }

    // axes
    svg.push_str(&format!(
        "<line class=\"axis\" x1=\"{l:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\" \
         stroke=\"black\" stroke-width=\"1.5\"/>\n\
         <line class=\"axis\" x1=\"{l:.2}\" y1=\"{t:.2}\" x2=\"{l:.2}\" y2=\"{b:.2}\" \
         stroke=\"black\" stroke-width=\"1.5\"/>\n",
        l = MARGIN_LEFT,
        r = MARGIN_LEFT + plot_w,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h,
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        xml_escape(&labels.x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        xml_escape(&labels.y_label)
    ));

    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        match kind {
            PlotKind::Lines => {
                let points: Vec<String> = s
                    .x
                    .iter()
                    .zip(s.y.iter())
                    .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
                    .collect();
                svg.push_str(&format!(
                    "<polyline class=\"series\" fill=\"none\" stroke=\"{color}\" \
                     stroke-width=\"1.5\" points=\"{}\"/>\n",
                    points.join(" ")
                ));
            }
            PlotKind::ErrorBars => {
                let errs = s.y_err.as_ref().expect("validated above");
                for ((&x, &y), &e) in s.x.iter().zip(s.y.iter()).zip(errs.iter()) {
                    let (cx, cy) = (px(x), py(y));
                    let (y_hi_px, y_lo_px) = (py(y + e.abs()), py(y - e.abs()));
                    svg.push_str(&format!(
                        "<line class=\"err-stem\" x1=\"{cx:.2}\" y1=\"{y_hi_px:.2}\" \
                         x2=\"{cx:.2}\" y2=\"{y_lo_px:.2}\" stroke=\"{color}\" stroke-width=\"1\"/>\n"
                    ));
                    for cap_y in [y_hi_px, y_lo_px] {
                        svg.push_str(&format!(
                            "<line class=\"err-cap\" x1=\"{:.2}\" y1=\"{cap_y:.2}\" x2=\"{:.2}\" \
                             y2=\"{cap_y:.2}\" stroke=\"{color}\" stroke-width=\"1\"/>\n",
                            cx - 4.0,
                            cx + 4.0
                        ));
                    }
                    svg.push_str(&format!(
                        "<circle class=\"marker\" cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"3\" \
                         fill=\"{color}\"/>\n"
                    ));
                }
            }
        }
        // legend entry
        let ly = MARGIN_TOP + 8.0 + si as f64 * 18.0;
        svg.push_str(&format!(
            "<rect class=\"legend-swatch\" x=\"{:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\" \
             fill=\"{color}\"/>\n",
            MARGIN_LEFT + plot_w - 150.0,
            ly - 10.0
        ));
        svg.push_str(&format!(
            "<text class=\"legend-label\" x=\"{:.2}\" y=\"{ly:.2}\" font-family=\"sans-serif\" \
             font-size=\"12\">{}</text>\n",
            MARGIN_LEFT + plot_w - 132.0,
            xml_escape(&s.name)
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Render and write an SVG file.
pub fn render_svg(series: &[Series], kind: PlotKind, labels: &PlotLabels, path: &Path) -> CliResult<()> {
    let svg = render_svg_string(series, kind, labels)?;
    std::fs::write(path, svg)
        .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}
