use std::path::{Path, PathBuf};

use podreliab_core::pod::PoapOptions;
use podreliab_core::traffic::DetectionOptions;
use podreliab_core::trajectory::{IngestOptions, RiverAxis, SplitOptions, UtmZone, WindowConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Run configuration, read from JSON. Relative paths resolve against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub ais_csv: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub scenario: Option<PathBuf>,
    pub river_axis: RiverAxis,
    /// Zone for rows given as latitude/longitude.
    pub utm_zone: Option<UtmZone>,
    pub gap_seconds: i64,
    pub turn_degrees: f64,
    pub input_length: usize,
    pub output_length: usize,
    pub threshold_m: f64,
    pub h_max: f64,
    pub confidence: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub stationary_threshold_m: f64,
    pub lateral_gate_m: Option<f64>,
    pub demo_scenes: u32,
    pub demo_windows: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ais_csv: None,
            predictions: None,
            labels: None,
            scenario: None,
            river_axis: RiverAxis::default(),
            utm_zone: None,
            gap_seconds: 600,
            turn_degrees: 150.0,
            input_length: 5,
            output_length: 5,
            threshold_m: 20.0,
            h_max: 5.0,
            confidence: 0.95,
            out_dir: PathBuf::from("out"),
            seed: 42,
            stationary_threshold_m: 50.0,
            lateral_gate_m: None,
            demo_scenes: 40,
            demo_windows: 12,
        }
    }
}

impl RunConfig {
    /// Parses a config and resolves its relative paths against `base`.
    pub fn from_json(bytes: &[u8], base: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig = serde_json::from_slice(bytes).map_err(|e| CliError::Input(format!("config: {e}")))?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [&mut cfg.ais_csv, &mut cfg.predictions, &mut cfg.labels, &mut cfg.scenario].into_iter().flatten() {
            resolve(p);
        }
        resolve(&mut cfg.out_dir);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Input(format!("config: {m}")));
        if !(self.threshold_m > 0.0 && self.threshold_m.is_finite()) {
            return bad("threshold_m must be > 0");
        }
        if !(self.h_max > 0.0 && self.h_max.is_finite()) {
            return bad("h_max must be > 0");
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return bad("confidence must lie in (0, 1)");
        }
        if self.input_length < 2 || self.output_length < 1 {
            return bad("input_length must be >= 2 and output_length >= 1");
        }
        if self.gap_seconds <= 0 || !(self.turn_degrees > 0.0 && self.turn_degrees <= 180.0) {
            return bad("gap_seconds must be > 0 and turn_degrees in (0, 180]");
        }
        if self.stationary_threshold_m.is_nan()
            || self.stationary_threshold_m < 0.0
            || self.lateral_gate_m.is_some_and(|g| g.is_nan() || g <= 0.0)
        {
            return bad("stationary_threshold_m must be >= 0 and lateral_gate_m > 0");
        }
        if self.demo_scenes == 0 || self.demo_windows == 0 {
            return bad("demo_scenes and demo_windows must be >= 1");
        }
        Ok(())
    }

    pub fn poap(&self) -> PoapOptions {
        PoapOptions {
            threshold_m: self.threshold_m,
            h_max: self.h_max,
            confidence: self.confidence,
            ..Default::default()
        }
    }

    pub fn window(&self) -> WindowConfig {
        WindowConfig { window: self.input_length + self.output_length, input_length: self.input_length }
    }

    pub fn split(&self) -> SplitOptions {
        SplitOptions {
            gap_seconds: self.gap_seconds,
            turn_degrees: self.turn_degrees,
            min_points: self.input_length + self.output_length,
            ..Default::default()
        }
    }

    pub fn ingest(&self) -> IngestOptions {
        IngestOptions { projection: self.utm_zone }
    }

    pub fn detection(&self) -> DetectionOptions {
        DetectionOptions { stationary_threshold_m: self.stationary_threshold_m, lateral_gate_m: self.lateral_gate_m }
    }
}
