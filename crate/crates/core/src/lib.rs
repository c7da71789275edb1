//! Endpoint trajectory prediction from per-frame bounding boxes.
//!
//! The pipeline is: parse a detection stream ([`detection`]), split the box
//! centres into per-axis time series, fit a model per axis ([`regression`]),
//! extrapolate a fixed number of frames past a cutoff and gate the result
//! against a rectangular region ([`trajectory`]). [`evaluation`] scores
//! predictions against ground truth and [`synth`] produces seeded
//! trajectories to score them on.

// `!(a < b)` is used deliberately so NaN falls on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detection;
pub mod evaluation;
pub mod plot;
pub mod regression;
pub mod synth;
pub mod trajectory;

pub use detection::{
    build_series, parse_detections, select_per_frame, series_from_stream, to_observation,
    write_detections, Axis, AxisSeries, DetectionRecord, EndpointObservation, IngestError, Sample,
    StreamFormat,
};
pub use evaluation::{
    compare, comparison_csv, comparison_text, error_rate, evaluate, run_benchmark, BenchmarkCase,
    ErrorReport, EvalError,
};
pub use regression::{
    fit_linear, fit_model, fit_model_with, predict, residual_rmse, FitError, FitOptions, FitResult,
    LinearFit, ModelKind,
};
pub use synth::{detections_from_series, synthesize, SynthError, SyntheticSpec, Variant};
pub use trajectory::{
    fit_trajectory, gate, predict_endpoint, window, PredictedEndpoint, Region, TrajectoryError,
    TrajectoryFit, WindowConfig, WindowLength, DEFAULT_HORIZON,
};
