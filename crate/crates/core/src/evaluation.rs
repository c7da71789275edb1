//! Error-rate scoring and multi-model comparison tables.

use std::fmt::Write as _;

use thiserror::Error;

use crate::detection::{Axis, AxisSeries};
use crate::regression::ModelKind;
use crate::synth::{synthesize, SynthError, SyntheticSpec};
use crate::trajectory::{predict_endpoint, WindowConfig};

/// Header of the comparison CSV.
pub const COMPARISON_HEADER: &str =
    "model,err_x_pct,err_y_pct,t_target,pred_x,pred_y,actual_x,actual_y";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("error rate is undefined against an actual value of 0")]
    ZeroReference,
    #[error("no ground-truth {axis} sample at t = {t}")]
    MissingTruth { axis: Axis, t: f64 },
    #[error(transparent)]
    Synth(#[from] SynthError),
}

/// Percentage error of `predicted` relative to `actual`.
pub fn error_rate(predicted: f64, actual: f64) -> Result<f64, EvalError> {
    if actual == 0.0 {
        return Err(EvalError::ZeroReference);
    }
    Ok((predicted - actual).abs() / actual.abs() * 100.0)
}

/// One scored row of a comparison. `None` error fields mean the model could
/// not be scored; `failure` then says why.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub kind: ModelKind,
    pub err_x_pct: Option<f64>,
    pub err_y_pct: Option<f64>,
    pub t_target: f64,
    pub predicted: Option<(f64, f64)>,
    pub actual: (f64, f64),
    pub failure: Option<String>,
}

fn truth(xs: &AxisSeries, ys: &AxisSeries, t_target: f64) -> Result<(f64, f64), EvalError> {
    let x = xs.value_at(t_target).ok_or(EvalError::MissingTruth {
        axis: Axis::X,
        t: t_target,
    })?;
    let y = ys.value_at(t_target).ok_or(EvalError::MissingTruth {
        axis: Axis::Y,
        t: t_target,
    })?;
    Ok((x, y))
}

/// Predicts from data up to `cutoff_t` and scores against the sample at
/// `cutoff_t + horizon`.
pub fn evaluate(
    xs: &AxisSeries,
    ys: &AxisSeries,
    kind: ModelKind,
    cutoff_t: f64,
    config: &WindowConfig,
) -> Result<ErrorReport, EvalError> {
    let t_target = cutoff_t + config.horizon() as f64;
    let actual = truth(xs, ys, t_target)?;
    Ok(score(xs, ys, kind, cutoff_t, config, t_target, actual))
}

fn score(
    xs: &AxisSeries,
    ys: &AxisSeries,
    kind: ModelKind,
    cutoff_t: f64,
    config: &WindowConfig,
    t_target: f64,
    actual: (f64, f64),
) -> ErrorReport {
    let mut report = ErrorReport {
        kind,
        err_x_pct: None,
        err_y_pct: None,
        t_target,
        predicted: None,
        actual,
        failure: None,
    };
    match predict_endpoint(xs, ys, kind, config, cutoff_t, None) {
        Ok(p) => {
            report.predicted = Some((p.x, p.y));
            let mut reasons = Vec::new();
            match error_rate(p.x, actual.0) {
                Ok(e) => report.err_x_pct = Some(e),
                Err(e) => reasons.push(format!("x axis: {e}")),
            }
            match error_rate(p.y, actual.1) {
                Ok(e) => report.err_y_pct = Some(e),
                Err(e) => reasons.push(format!("y axis: {e}")),
            }
            if !reasons.is_empty() {
                report.failure = Some(reasons.join("; "));
            }
        }
        Err(e) => report.failure = Some(e.to_string()),
    }
    report
}

/// Scores every kind on the same data. A failing fit yields an unscored row
/// instead of aborting; missing ground truth aborts the whole table.
pub fn compare(
    xs: &AxisSeries,
    ys: &AxisSeries,
    kinds: &[ModelKind],
    cutoff_t: f64,
    config: &WindowConfig,
) -> Result<Vec<ErrorReport>, EvalError> {
    let t_target = cutoff_t + config.horizon() as f64;
    let actual = truth(xs, ys, t_target)?;
    Ok(kinds
        .iter()
        .map(|&kind| score(xs, ys, kind, cutoff_t, config, t_target, actual))
        .collect())
}

fn fixed(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}")).unwrap_or_default()
}

/// Renders reports as the comparison CSV. Unscored fields are left empty.
pub fn comparison_csv(reports: &[ErrorReport]) -> String {
    let mut out = String::new();
    out.push_str(COMPARISON_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{},{},{:.6},{:.6}",
            r.kind,
            fixed(r.err_x_pct),
            fixed(r.err_y_pct),
            r.t_target,
            fixed(r.predicted.map(|p| p.0)),
            fixed(r.predicted.map(|p| p.1)),
            r.actual.0,
            r.actual.1,
        );
    }
    out
}

/// Aligned-text table with one row per model and per-coordinate errors.
pub fn comparison_text(reports: &[ErrorReport]) -> String {
    let pct = |v: Option<f64>| v.map(|v| format!("{v:.6}%")).unwrap_or_else(|| "-".into());
    let rows: Vec<[String; 3]> = reports
        .iter()
        .map(|r| [r.kind.long_name(), pct(r.err_x_pct), pct(r.err_y_pct)])
        .collect();
    let header = [
        "Regression".to_string(),
        "x-error %".into(),
        "y-error %".into(),
    ];
    let mut widths = header.each_ref().map(|h| h.len());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(&header).chain(rows.iter()) {
        let _ = writeln!(
            out,
            "{:<w0$}  {:>w1$}  {:>w2$}",
            row[0],
            row[1],
            row[2],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        );
    }
    out
}

/// One benchmark case: a synthetic trajectory scored at one cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkCase {
    pub spec: SyntheticSpec,
    pub cutoff_t: f64,
}

/// Synthesises and scores every case. Each case owns its generator streams,
/// so `parallel = true` returns exactly what sequential execution returns.
pub fn run_benchmark(
    cases: &[BenchmarkCase],
    kinds: &[ModelKind],
    config: &WindowConfig,
    parallel: bool,
) -> Vec<Result<Vec<ErrorReport>, EvalError>> {
    let run_one = |case: &BenchmarkCase| -> Result<Vec<ErrorReport>, EvalError> {
        let (xs, ys) = synthesize(&case.spec)?;
        compare(&xs, &ys, kinds, case.cutoff_t, config)
    };
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return cases.par_iter().map(run_one).collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    cases.iter().map(run_one).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::WindowLength;

    fn line_series(axis: Axis, slope: f64, intercept: f64, n: usize) -> AxisSeries {
        AxisSeries::from_pairs(
            axis,
            (0..n).map(|t| (t as f64, slope * t as f64 + intercept)),
        )
        .unwrap()
    }

    fn exp_series(axis: Axis, a: f64, b: f64, n: usize) -> AxisSeries {
        AxisSeries::from_pairs(axis, (0..n).map(|t| (t as f64, (a * t as f64 + b).exp()))).unwrap()
    }

    #[test]
    fn error_rate_examples() {
        assert_eq!(error_rate(42.0, 42.0).unwrap(), 0.0);
        assert!((error_rate(100.23, 100.0).unwrap() - 0.23).abs() < 1e-9);
        assert!((error_rate(97.26, 100.0).unwrap() - 2.74).abs() < 1e-9);
        assert_eq!(error_rate(1.0, 0.0), Err(EvalError::ZeroReference));
        assert!((error_rate(-9.0, -10.0).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn linear_data_scores_zero() {
        let xs = line_series(Axis::X, 1.5, 10.0, 80);
        let ys = line_series(Axis::Y, -0.5, 200.0, 80);
        let r = evaluate(&xs, &ys, ModelKind::Linear, 19.0, &WindowConfig::default()).unwrap();
        assert_eq!(r.t_target, 79.0);
        assert!(r.err_x_pct.unwrap() < 1e-9 && r.err_y_pct.unwrap() < 1e-9);
    }

    #[test]
    fn exponential_data_scores_zero() {
        let xs = exp_series(Axis::X, 0.01, 2.0, 100);
        let ys = exp_series(Axis::Y, 0.005, 3.0, 100);
        for cutoff in [5.0, 20.0, 39.0] {
            let r = evaluate(
                &xs,
                &ys,
                ModelKind::Exponential,
                cutoff,
                &WindowConfig::default(),
            )
            .unwrap();
            assert!(r.err_x_pct.unwrap() <= 1e-6 * 100.0);
            assert!(r.err_y_pct.unwrap() <= 1e-6 * 100.0);
        }
    }

    #[test]
    fn missing_truth() {
        let xs = line_series(Axis::X, 1.0, 1.0, 30);
        let ys = line_series(Axis::Y, 1.0, 1.0, 30);
        let err =
            evaluate(&xs, &ys, ModelKind::Linear, 10.0, &WindowConfig::default()).unwrap_err();
        assert_eq!(
            err,
            EvalError::MissingTruth {
                axis: Axis::X,
                t: 70.0
            }
        );
        assert!(compare(
            &xs,
            &ys,
            &ModelKind::DEFAULT_COMPARISON,
            10.0,
            &WindowConfig::default()
        )
        .is_err());
    }

    #[test]
    fn compare_preserves_order_and_isolates_failures() {
        let xs = exp_series(Axis::X, 0.02, 3.0, 100);
        // A zero early in y breaks only the exponential family.
        let mut y_pairs: Vec<_> = (0..100).map(|t| (t as f64, 50.0 + t as f64)).collect();
        y_pairs[3].1 = 0.0;
        let ys = AxisSeries::from_pairs(Axis::Y, y_pairs).unwrap();
        let kinds = [
            ModelKind::SinExponential,
            ModelKind::CosExponential,
            ModelKind::Exponential,
            ModelKind::Polynomial(2),
        ];
        let rows = compare(&xs, &ys, &kinds, 20.0, &WindowConfig::default()).unwrap();
        assert_eq!(rows.iter().map(|r| r.kind).collect::<Vec<_>>(), kinds);
        for r in &rows[..3] {
            assert!(r.err_x_pct.is_none() && r.err_y_pct.is_none());
            assert!(r.failure.as_deref().unwrap().contains("y axis"));
        }
        assert!(rows[3].err_x_pct.is_some() && rows[3].err_y_pct.is_some());
    }

    #[test]
    fn default_kinds_follow_table_order() {
        let names: Vec<String> = ModelKind::DEFAULT_COMPARISON
            .iter()
            .map(|k| k.to_string())
            .collect();
        assert_eq!(names, ["sinexp", "cosexp", "exp", "poly2"]);
    }

    #[test]
    fn csv_renders_unavailable_as_empty() {
        let xs = exp_series(Axis::X, 0.02, 3.0, 70);
        let ys = exp_series(Axis::Y, 0.01, 4.0, 70);
        let cfg = WindowConfig::new(WindowLength::Last(2), 60).unwrap();
        let rows = compare(
            &xs,
            &ys,
            &[ModelKind::Exponential, ModelKind::Polynomial(2)],
            9.0,
            &cfg,
        )
        .unwrap();
        let csv = comparison_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], COMPARISON_HEADER);
        assert!(lines[1].starts_with("exp,0.000000,0.000000,69.000000,"));
        assert!(lines[2].starts_with("poly2,,,69.000000,,,"));

        let text = comparison_text(&rows);
        assert!(text.lines().next().unwrap().starts_with("Regression"));
        assert!(text.contains("Polynomial regression (degree 2)"));
    }
}
