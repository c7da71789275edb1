//! Windowed per-axis fitting, horizon prediction, and defect gating.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::detection::{Axis, AxisSeries, Sample};
use crate::regression::{fit_model_with, predict, FitError, FitOptions, FitResult, ModelKind};

/// Frames ahead of the cutoff at which the endpoint is predicted by default.
pub const DEFAULT_HORIZON: u32 = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrajectoryError {
    #[error("{axis} axis: {source}")]
    Fit {
        axis: Axis,
        #[source]
        source: FitError,
    },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid window config: {0}")]
    InvalidConfig(String),
}

/// Axis-aligned rectangle in pixel space. Points on the boundary are inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Region {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, TrajectoryError> {
        if !(x_min < x_max) || !(y_min < y_max) {
            return Err(TrajectoryError::InvalidRegion(format!(
                "need x_min < x_max and y_min < y_max, got [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }
}

impl FromStr for Region {
    type Err = String;

    /// `x0,y0,x1,y1`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("region `{s}`: {e}"))?;
        match parts[..] {
            [x0, y0, x1, y1] => Region::new(x0, y0, x1, y1).map_err(|e| e.to_string()),
            _ => Err(format!("region `{s}` must have four values x0,y0,x1,y1")),
        }
    }
}

/// How much history a fit sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowLength {
    #[default]
    All,
    Last(usize),
}

impl FromStr for WindowLength {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(WindowLength::All);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 2 => Ok(WindowLength::Last(n)),
            Ok(n) => Err(format!("window length must be at least 2, got {n}")),
            Err(_) => Err(format!("window `{s}` must be a positive integer or `all`")),
        }
    }
}

impl fmt::Display for WindowLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowLength::All => f.write_str("all"),
            WindowLength::Last(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowConfig {
    length: WindowLength,
    horizon: u32,
    /// Options forwarded to every per-axis fit.
    pub fit: FitOptions,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            length: WindowLength::All,
            horizon: DEFAULT_HORIZON,
            fit: FitOptions::default(),
        }
    }
}

impl WindowConfig {
    pub fn new(length: WindowLength, horizon: u32) -> Result<Self, TrajectoryError> {
        if horizon == 0 {
            return Err(TrajectoryError::InvalidConfig(
                "horizon must be at least 1".into(),
            ));
        }
        if let WindowLength::Last(n) = length {
            if n < 2 {
                return Err(TrajectoryError::InvalidConfig(format!(
                    "window length must be at least 2, got {n}"
                )));
            }
        }
        Ok(Self {
            length,
            horizon,
            fit: FitOptions::default(),
        })
    }

    pub fn with_fit_options(mut self, fit: FitOptions) -> Self {
        self.fit = fit;
        self
    }

    pub fn length(&self) -> WindowLength {
        self.length
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedEndpoint {
    pub t_target: f64,
    pub x: f64,
    pub y: f64,
    pub defect: bool,
}

/// Samples with `t <= cutoff_t`, trimmed to the configured window length.
pub fn window(series: &AxisSeries, config: &WindowConfig, cutoff_t: f64) -> AxisSeries {
    let visible = series.samples().partition_point(|s| s.t <= cutoff_t);
    let start = match config.length {
        WindowLength::All => 0,
        WindowLength::Last(n) => visible.saturating_sub(n),
    };
    let samples: Vec<Sample> = series.samples()[start..visible].to_vec();
    AxisSeries::from_ordered(series.axis(), samples)
}

/// Both per-axis fits plus the prediction they produce.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFit {
    pub x_fit: FitResult,
    pub y_fit: FitResult,
    pub prediction: PredictedEndpoint,
}

pub fn predict_endpoint(
    xs: &AxisSeries,
    ys: &AxisSeries,
    kind: ModelKind,
    config: &WindowConfig,
    cutoff_t: f64,
    region: Option<&Region>,
) -> Result<PredictedEndpoint, TrajectoryError> {
    fit_trajectory(xs, ys, kind, config, cutoff_t, region).map(|f| f.prediction)
}

/// Like [`predict_endpoint`] but also returns the fitted models.
pub fn fit_trajectory(
    xs: &AxisSeries,
    ys: &AxisSeries,
    kind: ModelKind,
    config: &WindowConfig,
    cutoff_t: f64,
    region: Option<&Region>,
) -> Result<TrajectoryFit, TrajectoryError> {
    let t_target = cutoff_t + config.horizon as f64;
    let fit_axis = |series: &AxisSeries, axis: Axis| -> Result<(FitResult, f64), TrajectoryError> {
        let labelled = |source| TrajectoryError::Fit { axis, source };
        let windowed = window(series, config, cutoff_t);
        let fit = fit_model_with(&windowed, kind, config.fit).map_err(labelled)?;
        let value = predict(&fit, t_target).map_err(labelled)?;
        Ok((fit, value))
    };
    let (x_fit, x) = fit_axis(xs, Axis::X)?;
    let (y_fit, y) = fit_axis(ys, Axis::Y)?;
    let defect = region.is_some_and(|r| gate((x, y), r));
    Ok(TrajectoryFit {
        x_fit,
        y_fit,
        prediction: PredictedEndpoint {
            t_target,
            x,
            y,
            defect,
        },
    })
}

/// `true` when the point lies outside `region` (a defect).
pub fn gate(point: (f64, f64), region: &Region) -> bool {
    let (x, y) = point;
    x < region.x_min || x > region.x_max || y < region.y_min || y > region.y_max
}
