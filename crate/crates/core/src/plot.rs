//! Standalone SVG rendering of a two-panel prediction plot.
//!
//! Left panel plots `(t, x)`, right panel `(t, y)`. Each shows the observed
//! samples, the fitted curve sampled at integer `t` from the window start to
//! the target frame, and the predicted point. Output depends only on the
//! inputs, so identical inputs give byte-identical documents.

use std::fmt::Write as _;

use crate::detection::AxisSeries;
use crate::regression::{predict, FitResult};
use crate::trajectory::TrajectoryFit;

const PANEL_W: f64 = 460.0;
const PANEL_H: f64 = 360.0;
const MARGIN: f64 = 50.0;
const GAP: f64 = 40.0;

struct Panel<'a> {
    title: String,
    series: &'a AxisSeries,
    fit: &'a FitResult,
    predicted: f64,
}

/// Renders the plot for `fit`, whose window starts at `window_start`.
pub fn render_svg(
    xs: &AxisSeries,
    ys: &AxisSeries,
    fit: &TrajectoryFit,
    window_start: f64,
) -> String {
    let p = &fit.prediction;
    let panels = [
        Panel {
            title: format!("x(t): {}", fit.x_fit.kind.long_name()),
            series: xs,
            fit: &fit.x_fit,
            predicted: p.x,
        },
        Panel {
            title: format!("y(t): {}", fit.y_fit.kind.long_name()),
            series: ys,
            fit: &fit.y_fit,
            predicted: p.y,
        },
    ];
    let width = 2.0 * (PANEL_W + 2.0 * MARGIN) + GAP;
    let height = PANEL_H + 2.0 * MARGIN;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">
<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#
    );
    for (i, panel) in panels.iter().enumerate() {
        let origin_x = i as f64 * (PANEL_W + 2.0 * MARGIN + GAP) + MARGIN;
        render_panel(&mut svg, panel, origin_x, MARGIN, window_start, p.t_target);
    }
    svg.push_str("</svg>\n");
    svg
}

fn render_panel(
    svg: &mut String,
    panel: &Panel<'_>,
    ox: f64,
    oy: f64,
    window_start: f64,
    t_target: f64,
) {
    let curve: Vec<(f64, f64)> = {
        let first = window_start.ceil() as i64;
        let last = t_target.floor() as i64;
        (first..=last)
            .filter_map(|t| predict(panel.fit, t as f64).ok().map(|v| (t as f64, v)))
            .collect()
    };
    let points: Vec<(f64, f64)> = panel.series.samples().iter().map(|s| (s.t, s.v)).collect();

    let all = points
        .iter()
        .chain(curve.iter())
        .copied()
        .chain(std::iter::once((t_target, panel.predicted)));
    let (mut t0, mut t1, mut v0, mut v1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (t, v) in all {
        t0 = t0.min(t);
        t1 = t1.max(t);
        v0 = v0.min(v);
        v1 = v1.max(v);
    }
    if t1 <= t0 {
        t1 = t0 + 1.0;
    }
    if v1 <= v0 {
        v0 -= 1.0;
        v1 += 1.0;
    }
    let pad = (v1 - v0) * 0.05;
    let (v0, v1) = (v0 - pad, v1 + pad);
    let sx = |t: f64| ox + (t - t0) / (t1 - t0) * PANEL_W;
    let sy = |v: f64| oy + PANEL_H - (v - v0) / (v1 - v0) * PANEL_H;

    let _ = writeln!(
        svg,
        r#"<g class="panel" data-axis="{}">"#,
        panel.series.axis()
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{ox:.2}" y="{oy:.2}" width="{PANEL_W:.2}" height="{PANEL_H:.2}" fill="none" stroke="#444"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
        ox + PANEL_W / 2.0,
        oy - 18.0,
        escape(&panel.title)
    );
    for (label, x, y, anchor) in [
        (format!("{t0:.0}"), sx(t0), oy + PANEL_H + 16.0, "start"),
        (format!("{t1:.0}"), sx(t1), oy + PANEL_H + 16.0, "end"),
        (
            "t (frames)".to_string(),
            ox + PANEL_W / 2.0,
            oy + PANEL_H + 32.0,
            "middle",
        ),
        (format!("{v0:.2}"), ox - 4.0, oy + PANEL_H, "end"),
        (format!("{v1:.2}"), ox - 4.0, oy + 10.0, "end"),
    ] {
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{label}</text>"#
        );
    }
    if window_start > t0 {
        let _ = writeln!(
            svg,
            r##"<line class="window-start" x1="{x:.2}" y1="{oy:.2}" x2="{x:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            oy + PANEL_H,
            x = sx(window_start)
        );
    }

    let _ = write!(svg, r#"<g class="observations" fill="steelblue">"#);
    for &(t, v) in &points {
        let _ = write!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2"/>"#,
            sx(t),
            sy(v)
        );
    }
    svg.push_str("</g>\n");

    if !curve.is_empty() {
        let coords: Vec<String> = curve
            .iter()
            .map(|&(t, v)| format!("{:.2},{:.2}", sx(t), sy(v)))
            .collect();
        let _ = writeln!(
            svg,
            r##"<polyline class="fit" fill="none" stroke="#d62728" stroke-width="1.5" points="{}"/>"##,
            coords.join(" ")
        );
    }
    let _ = writeln!(
        svg,
        r##"<circle class="prediction" cx="{:.2}" cy="{:.2}" r="5" fill="#d62728" stroke="black"><title>t={t_target:.6} value={:.6}</title></circle>"##,
        sx(t_target),
        sy(panel.predicted),
        panel.predicted
    );
    svg.push_str("</g>\n");
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
