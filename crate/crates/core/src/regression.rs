//! Least-squares fitting of the exponential regression family.
//!
//! Every exponential-family model shares one ordinary least-squares fit on
//! `(t, ln v)`. That fit yields the growth coefficient `a` and a raw
//! intercept `c`. The variants differ only in how `c` becomes `b`:
//!
//! | kind             | b              | prediction                 |
//! |------------------|----------------|----------------------------|
//! | `Exponential`    | `c`            | `exp(a t + b)`             |
//! | `SinExponential` | `c - sin(a)`   | `exp(a t + b) + sin(a)`    |
//! | `CosExponential` | `c - cos(a)`   | `exp(a t + b) + cos(a)`    |
//!
//! The sin/cos correction is applied in value space, so the sin and cos
//! variants do not reproduce `exp(c)` at `t = 0`; the correction is not an
//! inverse of the log fit. `Polynomial(d)` is the plain least-squares
//! polynomial used as the non-linear baseline.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::detection::{AxisSeries, Sample};

/// Relative determinant below which the polynomial normal equations are
/// treated as singular.
pub const CONDITION_GUARD: f64 = 1e-12;

/// Floor applied to non-positive values when clamping is enabled.
pub const CLAMP_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("insufficient data: {kind} needs at least {needed} points, got {got}")]
    InsufficientData {
        kind: ModelKind,
        needed: usize,
        got: usize,
    },
    #[error("degenerate abscissa: all sample times are equal")]
    DegenerateAbscissa,
    #[error(
        "non-positive value {v} at sample {index} (t = {t}) cannot be log-transformed for {kind}"
    )]
    NonPositive {
        kind: ModelKind,
        index: usize,
        t: f64,
        v: f64,
    },
    #[error("non-finite sample {index} (t = {t}, v = {v})")]
    NonFinite { index: usize, t: f64, v: f64 },
    #[error("polynomial normal equations are ill-conditioned (relative determinant {ratio:e})")]
    IllConditioned { ratio: f64 },
    #[error("prediction at t = {t} is out of floating-point range")]
    Range { t: f64 },
    #[error("invalid polynomial degree {0}: must be at least 1")]
    InvalidDegree(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Linear,
    Exponential,
    SinExponential,
    CosExponential,
    Polynomial(usize),
}

impl ModelKind {
    /// Table row order used when no models are requested explicitly.
    pub const DEFAULT_COMPARISON: [ModelKind; 4] = [
        ModelKind::SinExponential,
        ModelKind::CosExponential,
        ModelKind::Exponential,
        ModelKind::Polynomial(2),
    ];

    pub fn min_points(self) -> usize {
        match self {
            ModelKind::Polynomial(d) => d + 1,
            _ => 2,
        }
    }

    pub fn is_exponential_family(self) -> bool {
        matches!(
            self,
            ModelKind::Exponential | ModelKind::SinExponential | ModelKind::CosExponential
        )
    }

    /// Human-readable name used in aligned-text tables.
    pub fn long_name(self) -> String {
        match self {
            ModelKind::Linear => "Linear regression".into(),
            ModelKind::Exponential => "Exponential regression".into(),
            ModelKind::SinExponential => "Sin exponential regression".into(),
            ModelKind::CosExponential => "Cos exponential regression".into(),
            ModelKind::Polynomial(d) => format!("Polynomial regression (degree {d})"),
        }
    }

    /// Parses a model name; a bare `poly` takes `default_degree`.
    pub fn parse_with_degree(s: &str, default_degree: usize) -> Result<Self, String> {
        let s = s.trim().to_ascii_lowercase();
        let kind = match s.as_str() {
            "linear" => ModelKind::Linear,
            "exp" | "exponential" => ModelKind::Exponential,
            "sinexp" => ModelKind::SinExponential,
            "cosexp" => ModelKind::CosExponential,
            "poly" => ModelKind::Polynomial(default_degree),
            other => match other.strip_prefix("poly").map(str::parse::<usize>) {
                Some(Ok(d)) => ModelKind::Polynomial(d),
                _ => {
                    return Err(format!(
                    "unknown model `{other}` (expected linear, exp, sinexp, cosexp, poly or polyN)"
                ))
                }
            },
        };
        if let ModelKind::Polynomial(0) = kind {
            return Err("polynomial degree must be at least 1".into());
        }
        Ok(kind)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Linear => f.write_str("linear"),
            ModelKind::Exponential => f.write_str("exp"),
            ModelKind::SinExponential => f.write_str("sinexp"),
            ModelKind::CosExponential => f.write_str("cosexp"),
            ModelKind::Polynomial(d) => write!(f, "poly{d}"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_with_degree(s, 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FitOptions {
    /// Replace `v <= 0` by [`CLAMP_FLOOR`] before the log transform
    /// instead of failing.
    pub clamp_nonpositive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub kind: ModelKind,
    /// Growth coefficient (slope for `Linear`). Zero for polynomials.
    pub a: f64,
    /// Intercept after the sin/cos correction. Zero for polynomials.
    pub b: f64,
    /// Polynomial coefficients in ascending power; empty otherwise.
    pub coefficients: Vec<f64>,
    pub n_points: usize,
    pub rmse: f64,
}

/// Ordinary least-squares straight line through `(t, v)` pairs.
pub fn fit_linear(pairs: &[(f64, f64)]) -> Result<LinearFit, FitError> {
    if pairs.len() < 2 {
        return Err(FitError::InsufficientData {
            kind: ModelKind::Linear,
            needed: 2,
            got: pairs.len(),
        });
    }
    let n = pairs.len() as f64;
    let t_mean = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let v_mean = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, v) in pairs {
        let dt = t - t_mean;
        sxy += dt * (v - v_mean);
        sxx += dt * dt;
    }
    if sxx == 0.0 {
        return Err(FitError::DegenerateAbscissa);
    }
    let slope = sxy / sxx;
    Ok(LinearFit {
        slope,
        intercept: v_mean - slope * t_mean,
    })
}

pub fn fit_model(series: &AxisSeries, kind: ModelKind) -> Result<FitResult, FitError> {
    fit_model_with(series, kind, FitOptions::default())
}

pub fn fit_model_with(
    series: &AxisSeries,
    kind: ModelKind,
    options: FitOptions,
) -> Result<FitResult, FitError> {
    fit_samples(series.samples(), kind, options)
}

pub(crate) fn fit_samples(
    samples: &[Sample],
    kind: ModelKind,
    options: FitOptions,
) -> Result<FitResult, FitError> {
    if let ModelKind::Polynomial(0) = kind {
        return Err(FitError::InvalidDegree(0));
    }
    if samples.len() < kind.min_points() {
        return Err(FitError::InsufficientData {
            kind,
            needed: kind.min_points(),
            got: samples.len(),
        });
    }
    if let Some((index, s)) = samples
        .iter()
        .enumerate()
        .find(|(_, s)| !(s.t.is_finite() && s.v.is_finite()))
    {
        return Err(FitError::NonFinite {
            index,
            t: s.t,
            v: s.v,
        });
    }

    let (a, b, coefficients) = match kind {
        ModelKind::Linear => {
            let pairs: Vec<_> = samples.iter().map(|s| (s.t, s.v)).collect();
            let line = fit_linear(&pairs)?;
            (line.slope, line.intercept, Vec::new())
        }
        ModelKind::Exponential | ModelKind::SinExponential | ModelKind::CosExponential => {
            let line = fit_log_linear(samples, kind, options)?;
            let a = line.slope;
            let b = match kind {
                ModelKind::SinExponential => line.intercept - a.sin(),
                ModelKind::CosExponential => line.intercept - a.cos(),
                _ => line.intercept,
            };
            (a, b, Vec::new())
        }
        ModelKind::Polynomial(degree) => (0.0, 0.0, fit_polynomial(samples, degree)?),
    };

    let mut fit = FitResult {
        kind,
        a,
        b,
        coefficients,
        n_points: samples.len(),
        rmse: 0.0,
    };
    fit.rmse = rmse_over(&fit, samples)?;
    Ok(fit)
}

fn fit_log_linear(
    samples: &[Sample],
    kind: ModelKind,
    options: FitOptions,
) -> Result<LinearFit, FitError> {
    let mut pairs = Vec::with_capacity(samples.len());
    for (index, s) in samples.iter().enumerate() {
        let v = if s.v > 0.0 {
            s.v
        } else if options.clamp_nonpositive {
            CLAMP_FLOOR
        } else {
            return Err(FitError::NonPositive {
                kind,
                index,
                t: s.t,
                v: s.v,
            });
        };
        pairs.push((s.t, v.ln()));
    }
    fit_linear(&pairs)
}

/// Least-squares polynomial via the normal equations.
///
/// The abscissa is centred and scaled to `[-1, 1]` before forming the Gram
/// matrix, then the solution is expanded back to ascending powers of raw `t`.
fn fit_polynomial(samples: &[Sample], degree: usize) -> Result<Vec<f64>, FitError> {
    let n = samples.len() as f64;
    let center = samples.iter().map(|s| s.t).sum::<f64>() / n;
    let scale = samples
        .iter()
        .map(|s| (s.t - center).abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(FitError::DegenerateAbscissa);
    }

    let m = degree + 1;
    let mut gram = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    let mut powers = vec![0.0; 2 * degree + 1];
    for s in samples {
        let u = (s.t - center) / scale;
        let mut p = 1.0;
        for slot in powers.iter_mut() {
            *slot = p;
            p *= u;
        }
        for j in 0..m {
            rhs[j] += s.v * powers[j];
            for k in 0..m {
                gram[j][k] += powers[j + k];
            }
        }
    }

    let scaled = solve_guarded(gram, rhs)?;
    Ok(expand_shifted(&scaled, center, scale))
}

/// Gaussian elimination with partial pivoting, rejecting systems whose
/// determinant is tiny relative to the product of its row norms.
fn solve_guarded(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, FitError> {
    let m = b.len();
    let row_scale: f64 = a
        .iter()
        .map(|row| row.iter().map(|x| x * x).sum::<f64>().sqrt())
        .product();
    let mut det = 1.0;
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if pivot != col {
            a.swap(pivot, col);
            b.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        if a[col][col] == 0.0 {
            break;
        }
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot = &upper[col];
        for (offset, r) in lower.iter_mut().enumerate() {
            let factor = r[col] / pivot[col];
            for (x, p) in r[col..m].iter_mut().zip(&pivot[col..m]) {
                *x -= factor * p;
            }
            b[col + 1 + offset] -= factor * b[col];
        }
    }
    let ratio = if row_scale > 0.0 {
        det.abs() / row_scale
    } else {
        0.0
    };
    if !(ratio >= CONDITION_GUARD) {
        return Err(FitError::IllConditioned { ratio });
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let tail: f64 = (row + 1..m).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// Rewrites `sum beta_k ((t - c) / s)^k` as `sum alpha_j t^j`.
fn expand_shifted(beta: &[f64], center: f64, scale: f64) -> Vec<f64> {
    let m = beta.len();
    let mut alpha = vec![0.0; m];
    for (k, &bk) in beta.iter().enumerate() {
        let lead = bk / scale.powi(k as i32);
        let mut binom = 1.0;
        for j in (0..=k).rev() {
            // binom = C(k, j)
            alpha[j] += lead * binom * (-center).powi((k - j) as i32);
            binom = binom * j as f64 / (k - j + 1) as f64;
        }
    }
    alpha
}

/// Evaluates a fitted model at time `t`.
pub fn predict(fit: &FitResult, t: f64) -> Result<f64, FitError> {
    let value = match fit.kind {
        ModelKind::Linear => fit.a * t + fit.b,
        ModelKind::Exponential => (fit.a * t + fit.b).exp(),
        ModelKind::SinExponential => (fit.a * t + fit.b).exp() + fit.a.sin(),
        ModelKind::CosExponential => (fit.a * t + fit.b).exp() + fit.a.cos(),
        ModelKind::Polynomial(_) => fit
            .coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c),
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(FitError::Range { t })
    }
}

/// Root-mean-square residual of `fit` over `series`, in value units.
pub fn residual_rmse(fit: &FitResult, series: &AxisSeries) -> Result<f64, FitError> {
    if series.is_empty() {
        return Err(FitError::InsufficientData {
            kind: fit.kind,
            needed: 1,
            got: 0,
        });
    }
    rmse_over(fit, series.samples())
}

fn rmse_over(fit: &FitResult, samples: &[Sample]) -> Result<f64, FitError> {
    let mut sum = 0.0;
    for s in samples {
        let r = predict(fit, s.t)? - s.v;
        sum += r * r;
    }
    Ok((sum / samples.len() as f64).sqrt())
}
