//! Seeded synthetic endpoint trajectories.
//!
//! The generator is ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64(seed)`. The x axis draws from stream 0 and the y axis from
//! stream 1, so the two axes never share state. Per frame and axis, draws
//! happen in this fixed order:
//!
//! 1. `z ~ StandardNormal` (ziggurat, `rand_distr`), always drawn;
//! 2. `u ~ Uniform[0, 1)`, always drawn;
//! 3. if `u < shake_prob`: `d ~ Uniform[-shake_scale, shake_scale]`.
//!
//! The value is `base * exp(noise_sigma * z) + d`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use thiserror::Error;

use crate::detection::{Axis, AxisSeries, DetectionRecord, Sample};

/// Side length of the square boxes written for synthetic detections.
pub const SYNTHETIC_BOX_SIZE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{key}` on line {line}")]
    UnknownKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: &'static str, message: String },
    #[error("generated {axis} value {value} at frame {frame} is not positive")]
    NonPositive {
        frame: usize,
        axis: Axis,
        value: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    PureExponential,
    SinExponential,
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "pureexponential" | "exponential" | "exp" => Ok(Variant::PureExponential),
            "sinexponential" | "sinexp" => Ok(Variant::SinExponential),
            _ => Err(format!(
                "unknown variant `{s}` (expected pure_exponential or sin_exponential)"
            )),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::PureExponential => "pure_exponential",
            Variant::SinExponential => "sin_exponential",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub a_x: f64,
    pub b_x: f64,
    pub a_y: f64,
    pub b_y: f64,
    pub variant: Variant,
    pub n_frames: usize,
    /// Standard deviation of the additive noise in log space.
    pub noise_sigma: f64,
    pub shake_prob: f64,
    /// Half-width of the uniform shake displacement, in pixels.
    pub shake_scale: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Noiseless spec with the given per-axis parameters.
    pub fn noiseless(a_x: f64, b_x: f64, a_y: f64, b_y: f64, n_frames: usize) -> Self {
        Self {
            a_x,
            b_x,
            a_y,
            b_y,
            variant: Variant::PureExponential,
            n_frames,
            noise_sigma: 0.0,
            shake_prob: 0.0,
            shake_scale: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let invalid = |key, message: String| Err(SynthError::InvalidValue { key, message });
        for (key, v) in [
            ("a_x", self.a_x),
            ("b_x", self.b_x),
            ("a_y", self.a_y),
            ("b_y", self.b_y),
        ] {
            if !v.is_finite() {
                return invalid(key, format!("must be finite, got {v}"));
            }
        }
        if self.n_frames == 0 {
            return invalid("n_frames", "must be positive".into());
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return invalid(
                "noise_sigma",
                format!("must be >= 0, got {}", self.noise_sigma),
            );
        }
        if !(0.0..=1.0).contains(&self.shake_prob) {
            return invalid(
                "shake_prob",
                format!("must lie in [0, 1], got {}", self.shake_prob),
            );
        }
        if !(self.shake_scale >= 0.0 && self.shake_scale.is_finite()) {
            return invalid(
                "shake_scale",
                format!("must be >= 0, got {}", self.shake_scale),
            );
        }
        Ok(())
    }

    /// Parses the `key = value` spec document. Blank lines and `#` comments
    /// are ignored. `a_x`, `b_x`, `a_y`, `b_y` and `n_frames` are required.
    pub fn parse(text: &str) -> Result<Self, SynthError> {
        let mut a_x = None;
        let mut b_x = None;
        let mut a_y = None;
        let mut b_y = None;
        let mut n_frames = None;
        let mut spec = SyntheticSpec::noiseless(0.0, 0.0, 0.0, 0.0, 1);

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| SynthError::Syntax {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            macro_rules! num {
                ($name:literal, $ty:ty) => {
                    value.parse::<$ty>().map_err(|e| SynthError::InvalidValue {
                        key: $name,
                        message: format!("`{value}`: {e}"),
                    })?
                };
            }
            match key {
                "a_x" => a_x = Some(num!("a_x", f64)),
                "b_x" => b_x = Some(num!("b_x", f64)),
                "a_y" => a_y = Some(num!("a_y", f64)),
                "b_y" => b_y = Some(num!("b_y", f64)),
                "n_frames" => n_frames = Some(num!("n_frames", usize)),
                "noise_sigma" => spec.noise_sigma = num!("noise_sigma", f64),
                "shake_prob" => spec.shake_prob = num!("shake_prob", f64),
                "shake_scale" => spec.shake_scale = num!("shake_scale", f64),
                "seed" => spec.seed = num!("seed", u64),
                "variant" => {
                    spec.variant = value.parse().map_err(|message| SynthError::InvalidValue {
                        key: "variant",
                        message,
                    })?
                }
                other => {
                    return Err(SynthError::UnknownKey {
                        line,
                        key: other.to_string(),
                    })
                }
            }
        }

        spec.a_x = a_x.ok_or(SynthError::MissingKey("a_x"))?;
        spec.b_x = b_x.ok_or(SynthError::MissingKey("b_x"))?;
        spec.a_y = a_y.ok_or(SynthError::MissingKey("a_y"))?;
        spec.b_y = b_y.ok_or(SynthError::MissingKey("b_y"))?;
        spec.n_frames = n_frames.ok_or(SynthError::MissingKey("n_frames"))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Inverse of [`SyntheticSpec::parse`].
    pub fn to_document(&self) -> String {
        format!(
            "a_x = {}\nb_x = {}\na_y = {}\nb_y = {}\nvariant = {}\nn_frames = {}\nnoise_sigma = {}\nshake_prob = {}\nshake_scale = {}\nseed = {}\n",
            self.a_x,
            self.b_x,
            self.a_y,
            self.b_y,
            self.variant,
            self.n_frames,
            self.noise_sigma,
            self.shake_prob,
            self.shake_scale,
            self.seed
        )
    }
}

fn axis_values(
    spec: &SyntheticSpec,
    axis: Axis,
    a: f64,
    b: f64,
    stream: u64,
) -> Result<Vec<Sample>, SynthError> {
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    let shake = Uniform::new_inclusive(-spec.shake_scale, spec.shake_scale).map_err(|e| {
        SynthError::InvalidValue {
            key: "shake_scale",
            message: e.to_string(),
        }
    })?;
    let offset = match spec.variant {
        Variant::PureExponential => 0.0,
        Variant::SinExponential => a.sin(),
    };
    let mut samples = Vec::with_capacity(spec.n_frames);
    for frame in 0..spec.n_frames {
        let t = frame as f64;
        let z: f64 = StandardNormal.sample(&mut rng);
        let u: f64 = rng.random();
        let base = (a * t + b).exp() + offset;
        let mut value = if spec.noise_sigma == 0.0 {
            base
        } else {
            base * (spec.noise_sigma * z).exp()
        };
        if u < spec.shake_prob {
            value += shake.sample(&mut rng);
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(SynthError::NonPositive { frame, axis, value });
        }
        samples.push(Sample { t, v: value });
    }
    Ok(samples)
}

/// Generates the x and y series for frames `0..n_frames`.
pub fn synthesize(spec: &SyntheticSpec) -> Result<(AxisSeries, AxisSeries), SynthError> {
    spec.validate()?;
    let xs = axis_values(spec, Axis::X, spec.a_x, spec.b_x, 0)?;
    let ys = axis_values(spec, Axis::Y, spec.a_y, spec.b_y, 1)?;
    Ok((
        AxisSeries::from_ordered(Axis::X, xs),
        AxisSeries::from_ordered(Axis::Y, ys),
    ))
}

/// Detection records whose box centres trace the given series.
pub fn detections_from_series(xs: &AxisSeries, ys: &AxisSeries) -> Vec<DetectionRecord> {
    xs.samples()
        .iter()
        .zip(ys.samples())
        .map(|(x, y)| DetectionRecord::centered(x.t as u64, x.v, y.v, SYNTHETIC_BOX_SIZE))
        .collect()
}
