//! WebAssembly bindings for the browser demo.
//!
//! Each operation takes a JSON request and returns a JSON response with an
//! SVG figure and the numbers behind it. The `*_json` functions hold the
//! logic so it can be tested natively; the exported wrappers only convert
//! errors for JavaScript.

use podreliab_core::pod::{build_poap_curve, select_transform, LevelData, PoapOptions, ReliableHorizon};
use podreliab_core::report::{poap_svg, scene_svg};
use podreliab_core::scenario::{generate_scene, random_scenario_spec, simulate_errors, SyntheticErrorSpec};
use podreliab_core::traffic::{classify_sample, detect_interactions, label_string, DetectionOptions};
use serde::{Deserialize, Serialize};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn parse<'a, T: Deserialize<'a>>(input: &'a str) -> Result<T, String> {
    serde_json::from_str(input).map_err(|e| format!("bad request: {e}"))
}

fn horizon(h: &ReliableHorizon) -> serde_json::Value {
    json!({ "text": h.to_string(), "status": h.status(), "value": h.value() })
}

#[derive(Deserialize)]
#[serde(default)]
pub struct PoapRequest {
    pub b: f64,
    pub m: f64,
    pub tau: f64,
    pub samples: usize,
    pub seed: u64,
    pub threshold_m: f64,
    pub h_max: f64,
    pub confidence: f64,
}

impl Default for PoapRequest {
    fn default() -> Self {
        Self { b: 2.0, m: 8.0, tau: 2.0, samples: 20, seed: 42, threshold_m: 20.0, h_max: 5.0, confidence: 0.95 }
    }
}

/// Simulates error series with linear growth, fits them and returns the
/// POAP curve with both reliability horizons.
pub fn poap_explorer_json(input: &str) -> Result<String, String> {
    let req: PoapRequest = parse(input)?;
    if !(req.h_max > 0.0 && req.h_max <= 30.0) {
        return Err("h_max must be in (0, 30] minutes".into());
    }
    let steps = (req.h_max / 0.05).round() as usize;
    let spec = SyntheticErrorSpec {
        b: req.b,
        m: req.m,
        tau: req.tau,
        levels: (1..=steps.max(3)).map(|k| k as f64 * 0.05).collect(),
        samples_per_level: req.samples,
        seed: req.seed,
    };
    let series = simulate_errors(&spec).map_err(|e| e.to_string())?;
    let opts = PoapOptions {
        threshold_m: req.threshold_m,
        h_max: req.h_max,
        confidence: req.confidence,
        ..Default::default()
    };
    let curve = build_poap_curve(&series, &opts).map_err(|e| e.to_string())?;
    let svg = poap_svg(&format!("POAP at {} m", req.threshold_m), &[("simulated", &curve)]);
    Ok(json!({
        "svg": svg,
        "a90": horizon(&curve.a90),
        "a90_95": horizon(&curve.a90_95),
        "fit": { "b": curve.fit.b, "m": curve.fit.m, "tau": curve.fit.tau, "r_squared": curve.fit.r_squared },
        "transform": curve.fit.transform.to_string(),
        "n_series": curve.n_series,
    })
    .to_string())
}

#[derive(Deserialize)]
pub struct TransformRequest {
    pub levels: Vec<f64>,
    pub responses: Vec<f64>,
}

#[derive(Serialize)]
struct CandidateRow {
    transform: String,
    r_squared: f64,
    heteroscedasticity: f64,
    admissible: bool,
}

/// Scores the four axis transforms on level means and reports the choice.
pub fn transform_explorer_json(input: &str) -> Result<String, String> {
    let req: TransformRequest = parse(input)?;
    let data = LevelData::new(req.levels, req.responses).map_err(|e| e.to_string())?;
    let sel = select_transform(&data).map_err(|e| e.to_string())?;
    let rows: Vec<CandidateRow> = sel
        .candidates
        .iter()
        .map(|c| CandidateRow {
            transform: c.transform.to_string(),
            r_squared: c.r_squared,
            heteroscedasticity: c.heteroscedasticity,
            admissible: c.admissible,
        })
        .collect();
    Ok(json!({ "chosen": sel.transform.to_string(), "fallback": sel.fallback, "candidates": rows }).to_string())
}

#[derive(Deserialize)]
#[serde(default)]
pub struct SceneRequest {
    pub seed: u64,
    pub windows: u32,
}

impl Default for SceneRequest {
    fn default() -> Self {
        Self { seed: 42, windows: 4 }
    }
}

/// Generates a random scene and labels each of its windows.
pub fn scene_explorer_json(input: &str) -> Result<String, String> {
    let req: SceneRequest = parse(input)?;
    if !(1..=24).contains(&req.windows) {
        return Err("windows must be between 1 and 24".into());
    }
    let spec = random_scenario_spec(req.seed, req.windows);
    let scene = generate_scene(&spec).map_err(|e| e.to_string())?;
    let opts = DetectionOptions::default();
    let windows: Vec<_> = scene
        .samples
        .iter()
        .map(|s| {
            let events = detect_interactions(s, &spec.river_axis, &opts);
            let label = classify_sample(&events);
            json!({
                "sample_id": s.sample_id,
                "label": label_string(&label),
                "group": label.coarse_group().as_str(),
                "events": events,
            })
        })
        .collect();
    let svg = scene_svg(&format!("Scene, seed {}", req.seed), &scene.trajectories, &scene.river_axis);
    Ok(json!({ "svg": svg, "scheduled": spec.events, "windows": windows }).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn poap_explorer(input: &str) -> Result<String, JsValue> {
    js(poap_explorer_json(input))
}

#[wasm_bindgen]
pub fn transform_explorer(input: &str) -> Result<String, JsValue> {
    js(transform_explorer_json(input))
}

#[wasm_bindgen]
pub fn scene_explorer(input: &str) -> Result<String, JsValue> {
    js(scene_explorer_json(input))
}
