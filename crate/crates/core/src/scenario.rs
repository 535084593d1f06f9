//! Synthetic river scenes with scheduled interactions, baseline predictors
//! and an error simulator for the regression model.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{ErrorSeries, PredictionSample};
use crate::traffic::InteractionKind;
use crate::trajectory::{
    window_sequences, write_records, RiverAxis, SequenceSample, TrackPoint, Trajectory, WindowConfig,
};

/// 2024-01-01T00:00:00Z; scenes start on a whole minute.
pub const DEFAULT_START_TIME: i64 = 1_704_067_200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledEvent {
    pub kind: InteractionKind,
    /// Minutes after scene start at which the along-river order flips.
    pub time_min: f64,
    /// Optional neighbour id; two events may not share one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbor: Option<String>,
}

/// Peak lateral offset (m) of the ego's evasive manoeuvre per interaction
/// kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvasiveOffsets {
    pub encounter: f64,
    pub overtaking: f64,
    pub overtaken: f64,
}

impl Default for EvasiveOffsets {
    fn default() -> Self {
        Self { encounter: 8.0, overtaking: 20.0, overtaken: 30.0 }
    }
}

impl EvasiveOffsets {
    fn for_kind(&self, kind: InteractionKind) -> f64 {
        match kind {
            InteractionKind::Encounter => self.encounter,
            InteractionKind::Overtaking => self.overtaking,
            InteractionKind::Overtaken => self.overtaken,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub seed: u64,
    /// Scene length in minutes.
    pub duration: u32,
    pub river_axis: RiverAxis,
    /// Ego speed over ground, m/s.
    pub ego_speed: f64,
    #[serde(default)]
    pub events: Vec<ScheduledEvent>,
    /// Standard deviation of the per-step lateral jitter, metres.
    #[serde(default)]
    pub maneuver_noise: f64,
    #[serde(default)]
    pub evasive_offsets: EvasiveOffsets,
    #[serde(default)]
    pub origin: [f64; 2],
    #[serde(default = "default_start")]
    pub start_time: i64,
    #[serde(default)]
    pub window: WindowConfig,
}

fn default_start() -> i64 {
    DEFAULT_START_TIME
}

impl ScenarioSpec {
    pub fn new(seed: u64, duration: u32, river_axis: RiverAxis, ego_speed: f64) -> Self {
        Self {
            seed,
            duration,
            river_axis,
            ego_speed,
            events: Vec::new(),
            maneuver_noise: 0.0,
            evasive_offsets: EvasiveOffsets::default(),
            origin: [0.0, 0.0],
            start_time: DEFAULT_START_TIME,
            window: WindowConfig::default(),
        }
    }

    pub fn with_event(mut self, kind: InteractionKind, time_min: f64) -> Self {
        self.events.push(ScheduledEvent { kind, time_min, neighbor: None });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration == 0 {
            return Err(Error::Scenario("duration must be positive".into()));
        }
        if !(self.ego_speed.is_finite() && self.ego_speed > 0.0) {
            return Err(Error::Scenario("ego speed must be positive".into()));
        }
        if !(self.maneuver_noise.is_finite() && self.maneuver_noise >= 0.0) {
            return Err(Error::Scenario("manoeuvre noise must be non-negative".into()));
        }
        let mut names = BTreeSet::new();
        for e in &self.events {
            if !(0.0..=f64::from(self.duration)).contains(&e.time_min) {
                return Err(Error::Scenario(format!("event at {} min lies outside the scene", e.time_min)));
            }
            if let Some(n) = &e.neighbor {
                if !names.insert(n.as_str()) {
                    return Err(Error::Scenario(format!("neighbour `{n}` is scheduled for two crossings")));
                }
            }
        }
        Ok(())
    }

    pub fn ego_id(&self) -> String {
        format!("ego-{}", self.seed)
    }

    fn neighbor_id(&self, index: usize, event: &ScheduledEvent) -> String {
        event.neighbor.clone().unwrap_or_else(|| format!("nb-{}-{}-{}", self.seed, index, event.kind))
    }
}

/// Generated trajectories (ego first) and the ego's windows.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub river_axis: RiverAxis,
    pub trajectories: Vec<Trajectory>,
    pub samples: Vec<SequenceSample>,
}

impl Scene {
    pub fn ego(&self) -> &Trajectory {
        &self.trajectories[0]
    }

    /// Writes every trajectory in the AIS CSV schema.
    pub fn write_csv<W: std::io::Write>(&self, sink: W) -> Result<()> {
        write_records(sink, self.trajectories.iter().flat_map(|t| &t.points))
    }
}

/// Neighbour speed relative to the ego and its lateral side.
fn neighbor_kinematics(kind: InteractionKind, ego_speed: f64) -> (f64, f64) {
    match kind {
        InteractionKind::Encounter => (-0.9 * ego_speed, -60.0),
        InteractionKind::Overtaking => (0.55 * ego_speed, 35.0),
        InteractionKind::Overtaken => (1.5 * ego_speed, 35.0),
    }
}

const EVASIVE_WIDTH_S: f64 = 120.0;

/// Builds the scene. The ego travels upstream along the axis at constant
/// speed with lateral jitter and a smooth evasive swerve around each
/// interaction. Each event adds a constant-velocity neighbour whose
/// along-river position meets the ego's exactly at the scheduled time.
pub fn generate_scene(spec: &ScenarioSpec) -> Result<Scene> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let jitter = Normal::new(0.0, spec.maneuver_noise).map_err(|e| Error::Scenario(e.to_string()))?;
    let [ax, ay] = spec.river_axis.components();
    let place = |along: f64, lateral: f64| -> [f64; 2] {
        [spec.origin[0] + along * ax - lateral * ay, spec.origin[1] + along * ay + lateral * ax]
    };
    let steps = spec.duration as usize + 1;
    let times: Vec<f64> = (0..steps).map(|k| k as f64 * 60.0).collect();

    let ego_id = spec.ego_id();
    let ego_points: Vec<TrackPoint> = times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let swerve: f64 = spec
                .events
                .iter()
                .map(|e| {
                    let (_, side) = neighbor_kinematics(e.kind, spec.ego_speed);
                    let dt = (t - e.time_min * 60.0) / EVASIVE_WIDTH_S;
                    -side.signum() * spec.evasive_offsets.for_kind(e.kind) * (-dt * dt).exp()
                })
                .sum();
            let lateral = swerve + jitter.sample(&mut rng);
            let [e, n] = place(spec.ego_speed * t, lateral);
            TrackPoint::new(ego_id.clone(), spec.start_time + 60 * k as i64, e, n)
        })
        .collect();
    let mut trajectories = vec![Trajectory { vessel_id: ego_id, points: ego_points, step_seconds: 60 }];

    for (i, event) in spec.events.iter().enumerate() {
        let id = spec.neighbor_id(i, event);
        let (speed, side) = neighbor_kinematics(event.kind, spec.ego_speed);
        let tc = event.time_min * 60.0;
        let meet = spec.ego_speed * tc;
        let points = times
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let lateral = side + jitter.sample(&mut rng);
                let [e, n] = place(meet + speed * (t - tc), lateral);
                TrackPoint::new(id.clone(), spec.start_time + 60 * k as i64, e, n)
            })
            .collect();
        trajectories.push(Trajectory { vessel_id: id, points, step_seconds: 60 });
    }

    let samples = window_sequences(&trajectories[0], &trajectories, &spec.window);
    Ok(Scene { river_axis: spec.river_axis, trajectories, samples })
}

/// Random spec for stress tests and the demo: per window either nothing or
/// a small mix of interactions, each scheduled strictly inside the
/// prediction horizon and off the minute grid.
pub fn random_scenario_spec(seed: u64, windows: u32) -> ScenarioSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5ce0_a210);
    let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let axis = RiverAxis::from_direction(angle.cos(), angle.sin()).expect("unit direction");
    let ego_speed = rng.random_range(2.5..4.0);
    let window = WindowConfig::default();
    let mut spec = ScenarioSpec::new(seed, windows * window.window as u32, axis, ego_speed);
    spec.maneuver_noise = 1.5;
    spec.origin = [rng.random_range(-5e3..5e3), rng.random_range(-5e3..5e3)];

    use InteractionKind::*;
    const MIXES: [(&[InteractionKind], f64); 8] = [
        (&[], 0.22),
        (&[Encounter], 0.30),
        (&[Encounter, Encounter], 0.12),
        (&[Encounter, Encounter, Encounter], 0.04),
        (&[Overtaking], 0.10),
        (&[Overtaken], 0.10),
        (&[Encounter, Overtaking], 0.06),
        (&[Encounter, Overtaken], 0.06),
    ];
    let horizon_start = window.input_length as f64 - 1.0;
    let horizon_end = window.window as f64 - 1.0;
    for w in 0..windows {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mix = MIXES
            .iter()
            .find(|(_, p)| {
                acc += p;
                u < acc
            })
            .map_or(&[][..], |(m, _)| *m);
        for kind in mix {
            let base = f64::from(w) * window.window as f64;
            let offset = rng.random_range(horizon_start + 0.2..horizon_end - 0.2);
            spec.events.push(ScheduledEvent { kind: *kind, time_min: base + offset, neighbor: None });
        }
    }
    spec
}

/// A trajectory predictor evaluated on sequence samples.
pub trait Predictor {
    fn name(&self) -> &str;
    fn predict(&self, sample: &SequenceSample) -> PredictionSample;
}

fn extrapolate(sample: &SequenceSample, model: &str, velocity: [f64; 2]) -> PredictionSample {
    let anchor = sample.anchor().position();
    let predicted = (1..=sample.output_length)
        .map(|k| [anchor[0] + velocity[0] * k as f64, anchor[1] + velocity[1] * k as f64])
        .collect();
    PredictionSample {
        sample_id: sample.sample_id.clone(),
        model: model.to_string(),
        anchor,
        truth: sample.output().iter().map(TrackPoint::position).collect(),
        predicted,
        label: None,
    }
}

/// Extrapolates the displacement of the last input step.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantVelocity;

impl Predictor for ConstantVelocity {
    fn name(&self) -> &str {
        "constant-velocity"
    }

    fn predict(&self, sample: &SequenceSample) -> PredictionSample {
        constant_velocity_predict(sample)
    }
}

/// Extrapolates the mean per-step displacement over the whole input window.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanVelocity;

impl Predictor for MeanVelocity {
    fn name(&self) -> &str {
        "mean-velocity"
    }

    fn predict(&self, sample: &SequenceSample) -> PredictionSample {
        let input = sample.input();
        let (first, last) = (input[0].position(), input[input.len() - 1].position());
        let steps = (input.len() - 1).max(1) as f64;
        extrapolate(sample, self.name(), [(last[0] - first[0]) / steps, (last[1] - first[1]) / steps])
    }
}

pub fn constant_velocity_predict(sample: &SequenceSample) -> PredictionSample {
    let input = sample.input();
    let velocity = match input {
        [.., a, b] => [b.easting - a.easting, b.northing - a.northing],
        _ => [0.0, 0.0],
    };
    extrapolate(sample, "constant-velocity", velocity)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticErrorSpec {
    pub b: f64,
    pub m: f64,
    pub tau: f64,
    /// Horizon grid, minutes.
    pub levels: Vec<f64>,
    pub samples_per_level: usize,
    pub seed: u64,
}

/// Draws `â = b + m·a + ε`, `ε ~ N(0, τ)`, truncated at zero, for
/// `samples_per_level` series over the level grid.
pub fn simulate_errors(spec: &SyntheticErrorSpec) -> Result<Vec<ErrorSeries>> {
    if !(spec.tau >= 0.0) || spec.samples_per_level == 0 {
        return Err(Error::InvalidInput("tau must be >= 0 and samples_per_level >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.samples_per_level)
        .map(|_| {
            let errors = spec
                .levels
                .iter()
                .map(|a| {
                    let mean = spec.b + spec.m * a;
                    let v = if spec.tau == 0.0 {
                        mean
                    } else {
                        let eps: f64 = StandardNormal.sample(&mut rng);
                        mean + spec.tau * eps
                    };
                    v.max(0.0)
                })
                .collect();
            ErrorSeries::new(spec.levels.clone(), errors)
        })
        .collect()
}
