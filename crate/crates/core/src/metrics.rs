//! Displacement errors, 3 s densification and summary statistics.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traffic::{CoarseGroup, TrafficSituationLabel};

/// Planar position in metres.
pub type Position = [f64; 2];

/// Interval between forecast steps.
pub const FORECAST_STEP_SECONDS: u32 = 60;
/// Densification interval used for POAP analysis.
pub const DENSE_STEP_SECONDS: u32 = 3;

/// Euclidean distance between a predicted and a true position.
pub fn displacement_error(predicted: Position, truth: Position) -> f64 {
    (predicted[0] - truth[0]).hypot(predicted[1] - truth[1])
}

/// Forecast and ground truth for one sample and one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSample {
    pub sample_id: String,
    pub model: String,
    /// Last observed position, shared origin of both polylines.
    pub anchor: Position,
    /// Ground truth, one position per forecast step.
    pub truth: Vec<Position>,
    pub predicted: Vec<Position>,
    pub label: Option<TrafficSituationLabel>,
}

impl PredictionSample {
    pub fn validate(&self) -> Result<()> {
        if self.truth.is_empty() || self.truth.len() != self.predicted.len() {
            return Err(Error::InvalidInput(format!(
                "sample {}: truth and prediction must have equal non-zero length ({} vs {})",
                self.sample_id,
                self.truth.len(),
                self.predicted.len()
            )));
        }
        let finite = |p: &Position| p[0].is_finite() && p[1].is_finite();
        if !finite(&self.anchor) || !self.truth.iter().all(finite) || !self.predicted.iter().all(finite) {
            return Err(Error::InvalidInput(format!("sample {}: non-finite coordinate", self.sample_id)));
        }
        Ok(())
    }

    pub fn output_length(&self) -> usize {
        self.truth.len()
    }
}

/// Errors against prediction horizon (minutes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSeries {
    pub horizons: Vec<f64>,
    pub errors: Vec<f64>,
}

impl ErrorSeries {
    pub fn new(horizons: Vec<f64>, errors: Vec<f64>) -> Result<Self> {
        if horizons.len() != errors.len() {
            return Err(Error::InvalidInput("horizons and errors differ in length".into()));
        }
        if horizons.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("horizons must be strictly increasing".into()));
        }
        if errors.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::InvalidInput("errors must be finite and non-negative".into()));
        }
        Ok(Self { horizons, errors })
    }

    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    /// Error at `horizon` minutes, matched within 1e-9.
    pub fn at(&self, horizon: f64) -> Option<f64> {
        self.horizons.iter().position(|h| (h - horizon).abs() <= 1e-9).map(|i| self.errors[i])
    }
}

/// Evaluates the polyline `anchor, points[0], points[1], ...` whose vertices
/// are `step` seconds apart at time `t` seconds.
fn polyline_at(anchor: Position, points: &[Position], t: u32, step: u32) -> Position {
    let vertex = |j: usize| if j == 0 { anchor } else { points[j - 1] };
    let j = (t / step) as usize;
    let rem = t % step;
    if rem == 0 {
        return vertex(j);
    }
    let (a, b) = (vertex(j), vertex(j + 1));
    let s = f64::from(rem) / f64::from(step);
    [a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s]
}

/// Per-step errors at 1, 2, ... minutes.
pub fn step_errors(sample: &PredictionSample) -> ErrorSeries {
    let errors = sample.predicted.iter().zip(&sample.truth).map(|(p, t)| displacement_error(*p, *t)).collect();
    let horizons = (1..=sample.truth.len()).map(|k| k as f64).collect();
    ErrorSeries { horizons, errors }
}

/// Errors on a `sub_step`-second grid, both polylines anchored at the last
/// observed position. Horizons are reported in minutes.
pub fn densify(sample: &PredictionSample, sub_step: u32) -> ErrorSeries {
    let end = FORECAST_STEP_SECONDS * sample.truth.len() as u32;
    let (horizons, errors) = (1..=end / sub_step)
        .map(|k| {
            let t = k * sub_step;
            let p = polyline_at(sample.anchor, &sample.predicted, t, FORECAST_STEP_SECONDS);
            let g = polyline_at(sample.anchor, &sample.truth, t, FORECAST_STEP_SECONDS);
            (f64::from(t) / 60.0, displacement_error(p, g))
        })
        .unzip();
    ErrorSeries { horizons, errors }
}

/// Errors every 3 s: horizons 0.05, 0.10, ... minutes.
pub fn densify_3s(sample: &PredictionSample) -> ErrorSeries {
    densify(sample, DENSE_STEP_SECONDS)
}

/// Box-plot style summary of a set of errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub median: f64,
    /// Population (divide-by-n) standard deviation.
    pub std: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub n: usize,
}

/// Linear-interpolation quantile of sorted data (the "type 7" rule).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 || lo + 1 >= sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Summary statistics; whiskers sit at the most extreme data within 1.5 IQR
/// of the box and never inside it.
pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let var = sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let whisker_low = sorted.iter().copied().find(|v| *v >= lo_fence).unwrap_or(q1).min(q1);
    let whisker_high = sorted.iter().rev().copied().find(|v| *v <= hi_fence).unwrap_or(q3).max(q3);
    Ok(SummaryStats { mean, median, std: var.sqrt(), q1, q3, whisker_low, whisker_high, n })
}

/// Which samples a statistic is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupFilter {
    Overall,
    Coarse(CoarseGroup),
    Label(TrafficSituationLabel),
}

impl GroupFilter {
    pub fn matches(&self, label: &TrafficSituationLabel) -> bool {
        match self {
            Self::Overall => true,
            Self::Coarse(g) => label.coarse_group() == *g,
            Self::Label(l) => l == label,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Overall => "Overall".into(),
            Self::Coarse(g) => g.to_string(),
            Self::Label(l) => l.display_name(),
        }
    }
}

/// Error series of one sample together with its traffic situation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleErrors {
    pub sample_id: String,
    pub label: TrafficSituationLabel,
    pub series: ErrorSeries,
}

/// Statistics at `horizon` minutes over the samples selected by `group`.
pub fn aggregate(errors: &[SampleErrors], group: GroupFilter, horizon: f64) -> Result<SummaryStats> {
    let values = errors
        .iter()
        .filter(|e| group.matches(&e.label))
        .map(|e| {
            e.series.at(horizon).ok_or_else(|| {
                Error::InvalidInput(format!("sample {} has no error at horizon {horizon} min", e.sample_id))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    summarize(&values)
}

/// One line of the predictions JSON-lines format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub sample_id: String,
    pub model: String,
    pub truth: Vec<Position>,
    pub pred: Vec<Position>,
    pub t0: Position,
    /// Optional traffic-situation label string; a label CSV takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl TryFrom<PredictionRecord> for PredictionSample {
    type Error = Error;

    fn try_from(r: PredictionRecord) -> Result<Self> {
        let label = r.label.as_deref().map(str::parse).transpose()?;
        let s = PredictionSample {
            sample_id: r.sample_id,
            model: r.model,
            anchor: r.t0,
            truth: r.truth,
            predicted: r.pred,
            label,
        };
        s.validate()?;
        Ok(s)
    }
}

impl From<&PredictionSample> for PredictionRecord {
    fn from(s: &PredictionSample) -> Self {
        PredictionRecord {
            sample_id: s.sample_id.clone(),
            model: s.model.clone(),
            truth: s.truth.clone(),
            pred: s.predicted.clone(),
            t0: s.anchor,
            label: s.label.map(|l| l.to_string()),
        }
    }
}

/// Reads predictions, one JSON object per non-blank line.
pub fn read_predictions<R: BufRead>(source: R) -> Result<Vec<PredictionSample>> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PredictionRecord =
            serde_json::from_str(&line).map_err(|e| Error::Parse { line: i as u64 + 1, message: e.to_string() })?;
        let sample = PredictionSample::try_from(record)
            .map_err(|e| Error::Parse { line: i as u64 + 1, message: e.to_string() })?;
        out.push(sample);
    }
    Ok(out)
}

pub fn write_predictions<'a, W, I>(mut sink: W, samples: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a PredictionSample>,
{
    for s in samples {
        serde_json::to_writer(&mut sink, &PredictionRecord::from(s))?;
        sink.write_all(b"\n")?;
    }
    Ok(())
}
