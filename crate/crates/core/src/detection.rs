//! Detection stream ingestion.
//!
//! Turns raw per-frame bounding boxes (JSONL or CSV) into time-stamped
//! endpoint observations and the two per-axis series the fitters consume.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Header row required by the CSV detection format.
pub const CSV_HEADER: &str = "frame,left,top,width,height,confidence,label";

/// Label written for synthetic detections.
pub const DEFAULT_LABEL: &str = "rebar_endpoint";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: parse error: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: invalid field `{field}`: {message}")]
    Validation {
        line: usize,
        field: &'static str,
        message: String,
    },
    #[error("observation {index}: time {t} is not strictly greater than the previous sample")]
    Ordering { index: usize, t: f64 },
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamFormat {
    Jsonl,
    Csv,
}

impl FromStr for StreamFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(StreamFormat::Jsonl),
            "csv" => Ok(StreamFormat::Csv),
            other => Err(format!(
                "unknown stream format `{other}` (expected jsonl or csv)"
            )),
        }
    }
}

impl fmt::Display for StreamFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StreamFormat::Jsonl => "jsonl",
            StreamFormat::Csv => "csv",
        })
    }
}

/// One bounding box emitted by an upstream detector for a single frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionRecord {
    #[serde(rename = "frame")]
    pub frame_index: u64,
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub confidence: f64,
    pub label: String,
}

impl DetectionRecord {
    /// Box of `size` x `size` pixels centred on `(x, y)`.
    pub fn centered(frame_index: u64, x: f64, y: f64, size: f64) -> Self {
        let half = size / 2.0;
        Self {
            frame_index,
            left: x - half,
            top: y - half,
            width: size,
            height: size,
            confidence: 1.0,
            label: DEFAULT_LABEL.to_string(),
        }
    }
}

/// Center point of a detection on the frame-index time axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointObservation {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            other => Err(format!("unknown axis `{other}` (expected x or y)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub v: f64,
}

/// One coordinate of the endpoint as a function of time.
///
/// Sample times are strictly increasing; gaps are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSeries {
    axis: Axis,
    samples: Vec<Sample>,
}

impl AxisSeries {
    pub fn new(axis: Axis, samples: Vec<Sample>) -> Result<Self, IngestError> {
        check_increasing(samples.iter().map(|s| s.t))?;
        Ok(Self { axis, samples })
    }

    pub fn from_pairs(
        axis: Axis,
        pairs: impl IntoIterator<Item = (f64, f64)>,
    ) -> Result<Self, IngestError> {
        Self::new(
            axis,
            pairs.into_iter().map(|(t, v)| Sample { t, v }).collect(),
        )
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    /// Value recorded at exactly time `t`, if any.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.samples
            .binary_search_by(|s| s.t.partial_cmp(&t).unwrap_or(Ordering::Less))
            .ok()
            .map(|i| self.samples[i].v)
    }

    /// Sub-series from an already ordered subset; crate-internal so the
    /// ordering invariant is upheld by construction.
    pub(crate) fn from_ordered(axis: Axis, samples: Vec<Sample>) -> Self {
        Self { axis, samples }
    }
}

fn check_increasing(times: impl Iterator<Item = f64>) -> Result<(), IngestError> {
    let mut prev: Option<f64> = None;
    for (index, t) in times.enumerate() {
        // NaN fails the comparison and is rejected here too.
        if let Some(p) = prev {
            if !(t > p) {
                return Err(IngestError::Ordering { index, t });
            }
        } else if t.is_nan() {
            return Err(IngestError::Ordering { index, t });
        }
        prev = Some(t);
    }
    Ok(())
}

#[derive(Deserialize)]
struct RawJsonRecord {
    frame: f64,
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    #[serde(default)]
    confidence: Option<f64>,
    #[serde(default)]
    label: Option<String>,
}

/// Parses a detection stream. Records come back in file order, unvalidated
/// for duplicates.
pub fn parse_detections<R: Read>(
    mut input: R,
    format: StreamFormat,
) -> Result<Vec<DetectionRecord>, IngestError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let text = String::from_utf8(bytes).map_err(|e| {
        let line = 1 + e.as_bytes()[..e.utf8_error().valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count();
        IngestError::Parse {
            line,
            message: "input is not valid UTF-8".into(),
        }
    })?;
    match format {
        StreamFormat::Jsonl => parse_jsonl(&text),
        StreamFormat::Csv => parse_csv(&text),
    }
}

fn parse_jsonl(text: &str) -> Result<Vec<DetectionRecord>, IngestError> {
    let mut out = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        if raw_line.trim().is_empty() {
            continue;
        }
        let raw: RawJsonRecord =
            serde_json::from_str(raw_line).map_err(|e| IngestError::Parse {
                line,
                message: e.to_string(),
            })?;
        out.push(validate(
            line,
            raw.frame,
            raw.left,
            raw.top,
            raw.width,
            raw.height,
            raw.confidence,
            raw.label.unwrap_or_default(),
        )?);
    }
    Ok(out)
}

fn parse_csv(text: &str) -> Result<Vec<DetectionRecord>, IngestError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    let mut saw_header = false;
    for result in reader.records() {
        let record = result.map_err(|e| IngestError::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if !saw_header {
            let header: Vec<&str> = record.iter().map(str::trim).collect();
            if header.join(",") != CSV_HEADER {
                return Err(IngestError::Parse {
                    line,
                    message: format!("expected header `{CSV_HEADER}`"),
                });
            }
            saw_header = true;
            continue;
        }
        if record.len() != 7 {
            return Err(IngestError::Parse {
                line,
                message: format!("expected 7 fields, found {}", record.len()),
            });
        }
        let num = |idx: usize, field: &'static str| -> Result<f64, IngestError> {
            record[idx]
                .trim()
                .parse::<f64>()
                .map_err(|_| IngestError::Parse {
                    line,
                    message: format!("field `{field}` is not a number: `{}`", &record[idx]),
                })
        };
        let confidence = if record[5].trim().is_empty() {
            None
        } else {
            Some(num(5, "confidence")?)
        };
        out.push(validate(
            line,
            num(0, "frame")?,
            num(1, "left")?,
            num(2, "top")?,
            num(3, "width")?,
            num(4, "height")?,
            confidence,
            record[6].to_string(),
        )?);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn validate(
    line: usize,
    frame: f64,
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    confidence: Option<f64>,
    label: String,
) -> Result<DetectionRecord, IngestError> {
    let invalid = |field: &'static str, message: String| IngestError::Validation {
        line,
        field,
        message,
    };
    if !(frame >= 0.0 && frame.fract() == 0.0 && frame < 2f64.powi(53)) {
        return Err(invalid(
            "frame",
            format!("must be a non-negative integer, got {frame}"),
        ));
    }
    if !left.is_finite() {
        return Err(invalid("left", format!("must be finite, got {left}")));
    }
    if !top.is_finite() {
        return Err(invalid("top", format!("must be finite, got {top}")));
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(invalid("width", format!("must be positive, got {width}")));
    }
    if !(height > 0.0 && height.is_finite()) {
        return Err(invalid("height", format!("must be positive, got {height}")));
    }
    let confidence = confidence.unwrap_or(1.0);
    if !(0.0..=1.0).contains(&confidence) {
        return Err(invalid(
            "confidence",
            format!("must lie in [0, 1], got {confidence}"),
        ));
    }
    Ok(DetectionRecord {
        frame_index: frame as u64,
        left,
        top,
        width,
        height,
        confidence,
        label,
    })
}

/// Serialises records in the given stream format (inverse of [`parse_detections`]).
pub fn write_detections(records: &[DetectionRecord], format: StreamFormat) -> String {
    let mut out = String::new();
    match format {
        StreamFormat::Jsonl => {
            for r in records {
                // Serialising plain numbers and a string cannot fail.
                out.push_str(&serde_json::to_string(r).expect("record serialises"));
                out.push('\n');
            }
        }
        StreamFormat::Csv => {
            let mut writer = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(Vec::new());
            writer
                .write_record(CSV_HEADER.split(','))
                .expect("in-memory write");
            for r in records {
                writer
                    .write_record([
                        r.frame_index.to_string(),
                        r.left.to_string(),
                        r.top.to_string(),
                        r.width.to_string(),
                        r.height.to_string(),
                        r.confidence.to_string(),
                        r.label.clone(),
                    ])
                    .expect("in-memory write");
            }
            let bytes = writer.into_inner().expect("in-memory flush");
            out = String::from_utf8(bytes).expect("csv output is UTF-8");
        }
    }
    out
}

/// Keeps one record per frame: highest confidence, then smallest `left`,
/// then smallest `top`. Output is sorted by frame.
pub fn select_per_frame(records: &[DetectionRecord]) -> Vec<DetectionRecord> {
    let mut best: BTreeMap<u64, &DetectionRecord> = BTreeMap::new();
    for r in records {
        best.entry(r.frame_index)
            .and_modify(|cur| {
                if beats(r, cur) {
                    *cur = r;
                }
            })
            .or_insert(r);
    }
    best.into_values().cloned().collect()
}

fn beats(candidate: &DetectionRecord, current: &DetectionRecord) -> bool {
    candidate
        .confidence
        .total_cmp(&current.confidence)
        .then_with(|| current.left.total_cmp(&candidate.left))
        .then_with(|| current.top.total_cmp(&candidate.top))
        == Ordering::Greater
}

pub fn to_observation(record: &DetectionRecord) -> EndpointObservation {
    EndpointObservation {
        t: record.frame_index as f64,
        x: record.left + record.width / 2.0,
        y: record.top + record.height / 2.0,
    }
}

/// Splits observations into the `(t, x)` and `(t, y)` series.
pub fn build_series(
    observations: &[EndpointObservation],
) -> Result<(AxisSeries, AxisSeries), IngestError> {
    check_increasing(observations.iter().map(|o| o.t))?;
    let xs = observations
        .iter()
        .map(|o| Sample { t: o.t, v: o.x })
        .collect();
    let ys = observations
        .iter()
        .map(|o| Sample { t: o.t, v: o.y })
        .collect();
    Ok((
        AxisSeries::from_ordered(Axis::X, xs),
        AxisSeries::from_ordered(Axis::Y, ys),
    ))
}

/// Parse, deduplicate, and split a detection stream in one step.
pub fn series_from_stream<R: Read>(
    input: R,
    format: StreamFormat,
) -> Result<(AxisSeries, AxisSeries), IngestError> {
    let records = parse_detections(input, format)?;
    let observations: Vec<_> = select_per_frame(&records)
        .iter()
        .map(to_observation)
        .collect();
    build_series(&observations)
}
