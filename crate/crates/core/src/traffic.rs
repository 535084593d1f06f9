//! Traffic-situation labelling.
//!
//! An interaction is an along-river crossing between the ego vessel and a
//! neighbour inside the prediction horizon. Opposite-direction crossings are
//! encounters; same-direction crossings are overtaking (ego passes) or
//! overtaken (ego is passed). A sample's label counts interactions per kind
//! and ignores their order.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::trajectory::RiverAxis;
use crate::trajectory::{SequenceSample, TrackPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionKind {
    Encounter,
    Overtaking,
    Overtaken,
}

impl InteractionKind {
    pub const ALL: [InteractionKind; 3] = [Self::Encounter, Self::Overtaking, Self::Overtaken];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Encounter => "encounter",
            Self::Overtaking => "overtaking",
            Self::Overtaken => "overtaken",
        }
    }
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InteractionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "encounter" => Ok(Self::Encounter),
            "overtaking" => Ok(Self::Overtaking),
            "overtaken" => Ok(Self::Overtaken),
            other => Err(Error::InvalidInput(format!("unknown interaction kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub kind: InteractionKind,
    pub neighbor_id: String,
    /// First grid time (epoch seconds) at which the along-river order has
    /// changed.
    pub event_time: i64,
}

/// Order-free counts of interactions per kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrafficSituationLabel {
    pub encounter: u32,
    pub overtaking: u32,
    pub overtaken: u32,
}

/// Coarse grouping used for error tables. Overtaken takes precedence over
/// overtaking, which takes precedence over encounter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CoarseGroup {
    Encounter,
    Overtaking,
    Overtaken,
    NoInteraction,
}

impl CoarseGroup {
    pub const ALL: [CoarseGroup; 4] = [Self::Encounter, Self::Overtaking, Self::Overtaken, Self::NoInteraction];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Encounter => "Encounter",
            Self::Overtaking => "Overtaking",
            Self::Overtaken => "Overtaken",
            Self::NoInteraction => "no-interaction",
        }
    }
}

impl fmt::Display for CoarseGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl TrafficSituationLabel {
    pub fn new(encounter: u32, overtaking: u32, overtaken: u32) -> Self {
        Self { encounter, overtaking, overtaken }
    }

    pub fn count(&self, kind: InteractionKind) -> u32 {
        match kind {
            InteractionKind::Encounter => self.encounter,
            InteractionKind::Overtaking => self.overtaking,
            InteractionKind::Overtaken => self.overtaken,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.encounter == 0 && self.overtaking == 0 && self.overtaken == 0
    }

    pub fn coarse_group(&self) -> CoarseGroup {
        if self.overtaken > 0 {
            CoarseGroup::Overtaken
        } else if self.overtaking > 0 {
            CoarseGroup::Overtaking
        } else if self.encounter > 0 {
            CoarseGroup::Encounter
        } else {
            CoarseGroup::NoInteraction
        }
    }

    /// Label with a capitalised first letter, as used for table rows.
    pub fn display_name(&self) -> String {
        let s = self.to_string();
        let mut chars = s.chars();
        match chars.next() {
            Some(c) => c.to_uppercase().chain(chars).collect(),
            None => s,
        }
    }
}

/// Canonical rendering: `encounter-k overtaking-m overtaken-n` with zero
/// counts omitted, or `no-interaction`.
pub fn label_string(label: &TrafficSituationLabel) -> String {
    label.to_string()
}

impl fmt::Display for TrafficSituationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("no-interaction");
        }
        let parts: Vec<String> = InteractionKind::ALL
            .iter()
            .filter(|k| self.count(**k) > 0)
            .map(|k| format!("{}-{}", k, self.count(*k)))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for TrafficSituationLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("no-interaction") {
            return Ok(Self::default());
        }
        let mut label = Self::default();
        for token in s.split_whitespace() {
            let (kind, n) =
                token.rsplit_once('-').ok_or_else(|| Error::InvalidInput(format!("bad label token `{token}`")))?;
            let n: u32 = n.parse().map_err(|_| Error::InvalidInput(format!("bad label count `{token}`")))?;
            match kind.parse::<InteractionKind>()? {
                InteractionKind::Encounter => label.encounter += n,
                InteractionKind::Overtaking => label.overtaking += n,
                InteractionKind::Overtaken => label.overtaken += n,
            }
        }
        if label.is_empty() {
            return Err(Error::InvalidInput(format!("empty label `{s}`")));
        }
        Ok(label)
    }
}

/// Position of a point along the river axis.
pub fn along_river_position(point: &TrackPoint, axis: &RiverAxis) -> f64 {
    axis.along(point.position())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionOptions {
    /// Neighbours whose net along-river displacement over the horizon is
    /// below this many metres have no direction; crossing one counts as an
    /// encounter.
    pub stationary_threshold_m: f64,
    /// Optional maximum lateral separation at the crossing. Off by default.
    pub lateral_gate_m: Option<f64>,
}

impl Default for DetectionOptions {
    fn default() -> Self {
        Self { stationary_threshold_m: 50.0, lateral_gate_m: None }
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Finds interactions between the ego vessel and each neighbour on the
/// prediction grid (anchor plus every forecast step).
///
/// For each neighbour the ego-relative order `rel = s_ego * (along_ego -
/// along_neighbour)` is evaluated at every grid time the neighbour covers.
/// The first time its sign departs from the first non-zero sign is the
/// event; later flips of the same neighbour are ignored.
pub fn detect_interactions(
    sample: &SequenceSample,
    axis: &RiverAxis,
    opts: &DetectionOptions,
) -> Vec<InteractionEvent> {
    let grid = &sample.ego.points[sample.input_length.saturating_sub(1)..];
    if grid.len() < 2 {
        return Vec::new();
    }
    let ego_along: Vec<f64> = grid.iter().map(|p| along_river_position(p, axis)).collect();
    let ego_dir = match sign(ego_along[ego_along.len() - 1] - ego_along[0]) {
        0 => 1,
        s => s,
    };

    let mut events = Vec::new();
    for nb in &sample.neighbors {
        let covered: Vec<(usize, [f64; 2])> = grid
            .iter()
            .enumerate()
            .filter_map(|(k, p)| nb.position_at(p.timestamp as f64).map(|pos| (k, pos)))
            .collect();
        if covered.len() < 2 {
            continue;
        }
        let first = axis.along(covered[0].1);
        let last = axis.along(covered[covered.len() - 1].1);
        let displacement = last - first;
        let nb_dir = if displacement.abs() < opts.stationary_threshold_m { 0 } else { sign(displacement) };

        let mut initial = 0i8;
        let mut crossing = None;
        for &(k, pos) in &covered {
            let rel = sign(f64::from(ego_dir) * (ego_along[k] - axis.along(pos)));
            if initial == 0 {
                initial = rel;
            } else if rel != initial {
                crossing = Some((k, pos));
                break;
            }
        }
        let Some((k, pos)) = crossing else { continue };
        if let Some(gate) = opts.lateral_gate_m {
            if (axis.lateral(grid[k].position()) - axis.lateral(pos)).abs() > gate {
                continue;
            }
        }
        let kind = if nb_dir == 0 || nb_dir != ego_dir {
            InteractionKind::Encounter
        } else if initial < 0 {
            InteractionKind::Overtaking
        } else {
            InteractionKind::Overtaken
        };
        events.push(InteractionEvent { kind, neighbor_id: nb.vessel_id.clone(), event_time: grid[k].timestamp });
    }
    events.sort_by(|a, b| a.event_time.cmp(&b.event_time).then_with(|| a.neighbor_id.cmp(&b.neighbor_id)));
    events
}

pub fn classify_sample(events: &[InteractionEvent]) -> TrafficSituationLabel {
    events.iter().fold(TrafficSituationLabel::default(), |mut l, e| {
        match e.kind {
            InteractionKind::Encounter => l.encounter += 1,
            InteractionKind::Overtaking => l.overtaking += 1,
            InteractionKind::Overtaken => l.overtaken += 1,
        }
        l
    })
}

/// Detects and classifies in one step.
pub fn label_sample(sample: &SequenceSample, axis: &RiverAxis, opts: &DetectionOptions) -> TrafficSituationLabel {
    classify_sample(&detect_interactions(sample, axis, opts))
}

#[derive(Debug, Serialize, Deserialize)]
struct LabelRow {
    sample_id: String,
    encounter: u32,
    overtaking: u32,
    overtaken: u32,
    label: String,
    coarse_group: String,
}

pub const LABEL_HEADER: [&str; 6] = ["sample_id", "encounter", "overtaking", "overtaken", "label", "coarse_group"];

/// Writes `sample_id,encounter,overtaking,overtaken,label,coarse_group`.
pub fn write_labels<'a, W, I>(sink: W, rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, &'a TrafficSituationLabel)>,
{
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    w.write_record(LABEL_HEADER)?;
    for (id, label) in rows {
        w.serialize(LabelRow {
            sample_id: id.to_string(),
            encounter: label.encounter,
            overtaking: label.overtaking,
            overtaken: label.overtaken,
            label: label.to_string(),
            coarse_group: label.coarse_group().to_string(),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a label CSV written by [`write_labels`]. The count columns are
/// authoritative.
pub fn read_labels<R: Read>(source: R) -> Result<BTreeMap<String, TrafficSituationLabel>> {
    let mut r = csv::Reader::from_reader(source);
    let mut out = BTreeMap::new();
    for row in r.deserialize::<LabelRow>() {
        let row = row?;
        out.insert(row.sample_id, TrafficSituationLabel::new(row.encounter, row.overtaking, row.overtaken));
    }
    Ok(out)
}
