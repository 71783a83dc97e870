//! Self-contained SVG rendering for ROC curves and bar charts.
//!
//! Output is plain SVG 1.1 text with no external references, so the files
//! are diffable and render anywhere.

use std::fs;
use std::fmt::Write as _;
use std::path::Path;

use crate::bootstrap::ConfidenceBand;
use crate::error::{Error, Result};
use crate::roc::{CurveKind, RocCurve};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn plot_x(fpr: f64) -> f64 {
    MARGIN_LEFT + fpr * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
}

fn plot_y(tpr: f64) -> f64 {
    MARGIN_TOP + (1.0 - tpr) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
}

fn svg_header(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tx:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" ",
            "text-anchor=\"middle\">{title}</text>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        tx = WIDTH / 2.0,
        title = xml_escape(title),
    )
}

fn curve_axes() -> String {
    let mut out = String::new();
    let x0 = plot_x(0.0);
    let x1 = plot_x(1.0);
    let y0 = plot_y(0.0);
    let y1 = plot_y(1.0);
    let _ = writeln!(
        out,
        "<rect x=\"{x0:.1}\" y=\"{y1:.1}\" width=\"{w:.1}\" height=\"{h:.1}\" fill=\"none\" stroke=\"#333333\"/>",
        w = x1 - x0,
        h = y0 - y1,
    );
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        let x = plot_x(v);
        let y = plot_y(v);
        let _ = writeln!(
            out,
            "<line x1=\"{x:.1}\" y1=\"{y0:.1}\" x2=\"{x:.1}\" y2=\"{t:.1}\" stroke=\"#333333\"/>",
            t = y0 + 5.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{x:.1}\" y=\"{ty:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{v:.2}</text>",
            ty = y0 + 20.0
        );
        let _ = writeln!(
            out,
            "<line x1=\"{l:.1}\" y1=\"{y:.1}\" x2=\"{x0:.1}\" y2=\"{y:.1}\" stroke=\"#333333\"/>",
            l = x0 - 5.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{tx:.1}\" y=\"{py:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{v:.2}</text>",
            tx = x0 - 9.0,
            py = y + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{cx:.1}\" y=\"{by:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">False positive rate</text>",
        cx = (x0 + x1) / 2.0,
        by = HEIGHT - 18.0
    );
    let _ = writeln!(
        out,
        "<text x=\"20\" y=\"{cy:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {cy:.1})\">True positive rate</text>",
        cy = (y0 + y1) / 2.0
    );
    // Chance line.
    let _ = writeln!(
        out,
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y1:.1}\" stroke=\"#999999\" stroke-dasharray=\"6,4\"/>"
    );
    out
}

fn curve_name(kind: &CurveKind) -> String {
    match kind {
        CurveKind::PerClass(name) => format!("class {name}"),
        CurveKind::Aggregated => "aggregated".to_string(),
        CurveKind::Micro => "micro".to_string(),
    }
}

/// Renders curves (plus an optional confidence band) into a standalone SVG:
/// unit-square axes, dashed chance diagonal, one polyline per curve, and a
/// legend carrying each curve's AUC.
pub fn render_curve_plot(
    curves: &[&RocCurve],
    band: Option<&ConfidenceBand>,
    path: impl AsRef<Path>,
) -> Result<()> {
    if curves.is_empty() {
        return Err(Error::Validation("need at least one curve to plot".into()));
    }
    let path = path.as_ref();
    let mut svg = svg_header("ROC curves");
    svg.push_str(&curve_axes());

    if let Some(band) = band {
        let mut points = String::new();
        for (f, u) in band.fpr_grid.iter().zip(&band.upper) {
            let _ = write!(points, "{:.2},{:.2} ", plot_x(*f), plot_y(*u));
        }
        for (f, l) in band.fpr_grid.iter().rev().zip(band.lower.iter().rev()) {
            let _ = write!(points, "{:.2},{:.2} ", plot_x(*f), plot_y(*l));
        }
        let _ = writeln!(
            svg,
            "<polygon points=\"{}\" fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"none\"/>",
            points.trim_end()
        );
    }

    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for p in &curve.points {
            let _ = write!(points, "{:.2},{:.2} ", plot_x(p.fpr), plot_y(p.tpr));
        }
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>",
            points.trim_end()
        );
    }

    // Legend, bottom right.
    let legend_x = plot_x(1.0) - 230.0;
    let mut legend_y = plot_y(0.0) - 16.0 * (curves.len() as f64 + 1.0) - 10.0;
    let _ = writeln!(
        svg,
        "<text x=\"{lx:.1}\" y=\"{ly:.1}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#666666\">chance (AUC = 0.500)</text>",
        lx = legend_x + 26.0,
        ly = legend_y + 4.0
    );
    legend_y += 16.0;
    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            svg,
            "<line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{lx2:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2.5\"/>",
            lx = legend_x,
            ly = legend_y,
            lx2 = legend_x + 20.0,
        );
        let _ = writeln!(
            svg,
            "<text x=\"{tx:.1}\" y=\"{ty:.1}\" font-family=\"sans-serif\" font-size=\"12\">{name} (AUC = {auc:.3})</text>",
            tx = legend_x + 26.0,
            ty = legend_y + 4.0,
            name = xml_escape(&curve_name(&curve.kind)),
            auc = curve.auc,
        );
        legend_y += 16.0;
    }

    svg.push_str("</svg>\n");
    fs::write(path, svg).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Renders a labeled bar chart (class frequencies, Gini weights) with the
/// value printed above each bar.
pub fn render_bar_chart(
    labels: &[String],
    values: &[f64],
    title: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    if labels.len() != values.len() {
        return Err(Error::Shape(format!(
            "{} labels for {} values",
            labels.len(),
            values.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::Validation("need at least one bar".into()));
    }
    if values.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::Validation(
            "bar values must be finite and nonnegative".into(),
        ));
    }
    let path = path.as_ref();

    let max_value = values.iter().fold(0.0_f64, |m, &v| m.max(v)).max(f64::MIN_POSITIVE);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let slot = plot_w / labels.len() as f64;
    let bar_w = slot * 0.7;

    let mut svg = svg_header(title);
    let baseline = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        "<line x1=\"{x0:.1}\" y1=\"{baseline:.1}\" x2=\"{x1:.1}\" y2=\"{baseline:.1}\" stroke=\"#333333\"/>",
        x0 = MARGIN_LEFT,
        x1 = MARGIN_LEFT + plot_w,
    );

    for (i, (label, &value)) in labels.iter().zip(values).enumerate() {
        let height = value / max_value * plot_h;
        let x = MARGIN_LEFT + i as f64 * slot + (slot - bar_w) / 2.0;
        let y = baseline - height;
        let _ = writeln!(
            svg,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{bar_w:.2}\" height=\"{height:.2}\" fill=\"#1f77b4\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{cx:.1}\" y=\"{vy:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{value:.3}</text>",
            cx = x + bar_w / 2.0,
            vy = y - 5.0,
        );
        let _ = writeln!(
            svg,
            "<text x=\"{cx:.1}\" y=\"{ly:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{label}</text>",
            cx = x + bar_w / 2.0,
            ly = baseline + 16.0,
            label = xml_escape(label),
        );
    }

    svg.push_str("</svg>\n");
    fs::write(path, svg).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
