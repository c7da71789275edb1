//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every entry point takes the synthetic trajectory as a spec document (the
//! same `key = value` text `rebarfit simulate --spec` reads), so the page and
//! the CLI describe scenarios identically.

use rebarfit::plot::render_svg;
use rebarfit::{
    build_series, compare, comparison_csv, detections_from_series, fit_trajectory, synthesize,
    to_observation, window, AxisSeries, ModelKind, Region, SyntheticSpec, WindowConfig,
    WindowLength,
};
use wasm_bindgen::prelude::*;

fn scenario(spec_doc: &str) -> Result<(AxisSeries, AxisSeries), String> {
    let spec = SyntheticSpec::parse(spec_doc).map_err(|e| e.to_string())?;
    let (xs, ys) = synthesize(&spec).map_err(|e| e.to_string())?;
    // Route through detection boxes so the demo sees what the CLI sees.
    let observations: Vec<_> = detections_from_series(&xs, &ys)
        .iter()
        .map(to_observation)
        .collect();
    build_series(&observations).map_err(|e| e.to_string())
}

fn config(horizon: u32, window_len: u32) -> Result<WindowConfig, String> {
    let length = match window_len {
        0 => WindowLength::All,
        n => WindowLength::Last(n as usize),
    };
    WindowConfig::new(length, horizon).map_err(|e| e.to_string())
}

/// SVG plot of the chosen model's per-axis fits and its prediction.
pub fn plot_scenario(
    spec_doc: &str,
    model: &str,
    cutoff: f64,
    horizon: u32,
    window_len: u32,
) -> Result<String, String> {
    let (xs, ys) = scenario(spec_doc)?;
    let kind: ModelKind = model.parse()?;
    let cfg = config(horizon, window_len)?;
    let fit = fit_trajectory(&xs, &ys, kind, &cfg, cutoff, None).map_err(|e| e.to_string())?;
    let start = window(&xs, &cfg, cutoff)
        .samples()
        .first()
        .map_or(cutoff, |s| s.t);
    Ok(render_svg(&xs, &ys, &fit, start))
}

/// Comparison CSV for the default model list at one cutoff.
pub fn compare_scenario(
    spec_doc: &str,
    cutoff: f64,
    horizon: u32,
    window_len: u32,
) -> Result<String, String> {
    let (xs, ys) = scenario(spec_doc)?;
    let cfg = config(horizon, window_len)?;
    let reports = compare(&xs, &ys, &ModelKind::DEFAULT_COMPARISON, cutoff, &cfg)
        .map_err(|e| e.to_string())?;
    Ok(comparison_csv(&reports))
}

/// `t_target,x,y,defect` for the prediction gated against a region.
#[allow(clippy::too_many_arguments)]
pub fn gate_scenario(
    spec_doc: &str,
    model: &str,
    cutoff: f64,
    horizon: u32,
    window_len: u32,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
) -> Result<String, String> {
    let (xs, ys) = scenario(spec_doc)?;
    let kind: ModelKind = model.parse()?;
    let cfg = config(horizon, window_len)?;
    let region = Region::new(x0, y0, x1, y1).map_err(|e| e.to_string())?;
    let p = fit_trajectory(&xs, &ys, kind, &cfg, cutoff, Some(&region))
        .map_err(|e| e.to_string())?
        .prediction;
    Ok(format!(
        "{:.6},{:.6},{:.6},{}",
        p.t_target, p.x, p.y, p.defect
    ))
}

#[wasm_bindgen(js_name = plotScenario)]
pub fn plot_scenario_js(
    spec_doc: &str,
    model: &str,
    cutoff: f64,
    horizon: u32,
    window_len: u32,
) -> Result<String, JsValue> {
    plot_scenario(spec_doc, model, cutoff, horizon, window_len).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = compareScenario)]
pub fn compare_scenario_js(
    spec_doc: &str,
    cutoff: f64,
    horizon: u32,
    window_len: u32,
) -> Result<String, JsValue> {
    compare_scenario(spec_doc, cutoff, horizon, window_len).map_err(|e| JsValue::from_str(&e))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = gateScenario)]
pub fn gate_scenario_js(
    spec_doc: &str,
    model: &str,
    cutoff: f64,
    horizon: u32,
    window_len: u32,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
) -> Result<String, JsValue> {
    gate_scenario(spec_doc, model, cutoff, horizon, window_len, x0, y0, x1, y1)
        .map_err(|e| JsValue::from_str(&e))
}
