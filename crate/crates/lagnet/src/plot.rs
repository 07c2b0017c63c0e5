//! Deterministic SVG line charts overlaying actual and predicted series.

use std::path::Path;

use crate::error::{Error, Result};

/// Chart description: one actual series plus at least one prediction overlay,
/// all of equal length.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub actual_label: String,
    pub actual: Vec<f64>,
    pub predicted: Vec<(String, Vec<f64>)>,
    pub width: u32,
    pub height: u32,
    /// Optional comment embedded verbatim in the SVG (e.g. the run config).
    pub comment: Option<String>,
}

impl PlotSpec {
    pub fn new(title: impl Into<String>, actual: Vec<f64>) -> Self {
        Self {
            title: title.into(),
            actual_label: "actual".into(),
            actual,
            predicted: Vec::new(),
            width: 900,
            height: 400,
            comment: None,
        }
    }

    pub fn with_series(mut self, label: impl Into<String>, values: Vec<f64>) -> Self {
        self.predicted.push((label.into(), values));
        self
    }

    fn validate(&self) -> Result<()> {
        if self.actual.is_empty() {
            return Err(Error::EmptySeries);
        }
        if self.predicted.is_empty() {
            return Err(Error::InvalidParameter {
                name: "predicted".into(),
                reason: "at least one predicted series is required".into(),
            });
        }
        for (_, series) in &self.predicted {
            if series.len() != self.actual.len() {
                return Err(Error::LengthMismatch {
                    left: self.actual.len(),
                    right: series.len(),
                });
            }
        }
        Ok(())
    }
}

const PALETTE: [&str; 6] = [
    "#1a1a1a", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
];
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 34.0;
const MARGIN_BOTTOM: f64 = 36.0;

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders the chart to an SVG string. Pure function of the spec, so the
/// bytes are identical for identical inputs.
pub fn render_svg(spec: &PlotSpec) -> Result<String> {
    spec.validate()?;
    let w = spec.width as f64;
    let h = spec.height as f64;
    let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
    let n = spec.actual.len();

    let all_values = spec
        .actual
        .iter()
        .chain(spec.predicted.iter().flat_map(|(_, s)| s.iter()));
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for &v in all_values {
        y_min = y_min.min(v);
        y_max = y_max.max(v);
    }
    // 5% padding; degenerate flat ranges get a unit band.
    let span = y_max - y_min;
    let pad = if span > 0.0 { 0.05 * span } else { 1.0 };
    let (lo, hi) = (y_min - pad, y_max + pad);

    let x_at = |i: usize| {
        if n == 1 {
            MARGIN_LEFT + plot_w / 2.0
        } else {
            MARGIN_LEFT + plot_w * i as f64 / (n - 1) as f64
        }
    };
    let y_at = |v: f64| MARGIN_TOP + plot_h * (1.0 - (v - lo) / (hi - lo));

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        spec.width, spec.height, spec.width, spec.height
    ));
    if let Some(comment) = &spec.comment {
        svg.push_str(&format!("<!-- {} -->\n", comment.replace("--", "-")));
    }
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        fmt(w / 2.0),
        escape(&spec.title)
    ));

    // Axes box and y tick labels.
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888888\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(MARGIN_TOP),
        fmt(plot_w),
        fmt(plot_h)
    ));
    for tick in 0..=4 {
        let frac = tick as f64 / 4.0;
        let value = lo + (hi - lo) * (1.0 - frac);
        let y = MARGIN_TOP + plot_h * frac;
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            fmt(MARGIN_LEFT - 6.0),
            fmt(y + 3.0),
            fmt(value)
        ));
        if tick > 0 && tick < 4 {
            svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
                fmt(MARGIN_LEFT),
                fmt(y),
                fmt(MARGIN_LEFT + plot_w),
                fmt(y)
            ));
        }
    }
    // x tick labels: first and last index.
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">0</text>\n",
        fmt(x_at(0)),
        fmt(h - MARGIN_BOTTOM + 16.0)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
        fmt(x_at(n - 1)),
        fmt(h - MARGIN_BOTTOM + 16.0),
        n - 1
    ));

    // One polyline per series: actual first, then predictions.
    let mut series: Vec<(&str, &[f64])> = vec![(spec.actual_label.as_str(), &spec.actual)];
    for (label, values) in &spec.predicted {
        series.push((label.as_str(), values));
    }
    for (idx, (_, values)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{},{}", fmt(x_at(i)), fmt(y_at(v))))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            color,
            points.join(" ")
        ));
    }

    // Legend, top-right inside the plot area.
    for (idx, (label, _)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let y = MARGIN_TOP + 14.0 + 14.0 * idx as f64;
        let x = MARGIN_LEFT + plot_w - 120.0;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            fmt(x),
            fmt(y - 3.0),
            fmt(x + 18.0),
            fmt(y - 3.0),
            color
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            fmt(x + 24.0),
            fmt(y),
            escape(label)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Validates, renders and writes the chart. Nothing is written on error.
pub fn emit_plot(spec: &PlotSpec, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_svg(spec)?;
    std::fs::write(path.as_ref(), svg)?;
    Ok(())
}
