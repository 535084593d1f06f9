//! End-to-end evaluation: errors, grouped statistics, POAP curves and both
//! report tables, plus the synthetic demo run.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{densify_3s, step_errors, summarize, ErrorSeries, GroupFilter, PredictionSample};
use crate::pod::{build_poap_curve, PoapCurve, PoapOptions};
use crate::report::{HorizonTable, HorizonTableRow, PoapSummary, StatsRecord, StatsTable, StatsTableRow};
use crate::scenario::{generate_scene, random_scenario_spec, ConstantVelocity, MeanVelocity, Predictor, Scene};
use crate::traffic::{label_sample, CoarseGroup, DetectionOptions, TrafficSituationLabel};

/// A fitted or unfittable curve for one model and one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCurve {
    pub model: String,
    pub group: String,
    pub n: usize,
    /// `Err` text when the group cannot be fitted.
    pub curve: std::result::Result<PoapCurve, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub models: Vec<String>,
    /// Per model, group and forecast step.
    pub stats: Vec<StatsRecord>,
    pub stats_table: StatsTable,
    pub curves: Vec<GroupCurve>,
    pub horizon_table: HorizonTable,
}

impl Evaluation {
    pub fn summaries(&self) -> Vec<PoapSummary> {
        self.curves
            .iter()
            .filter_map(|g| g.curve.as_ref().ok().map(|c| PoapSummary::new(&g.model, &g.group, c)))
            .collect()
    }

    /// Statistics rows of the `Overall` group, as drawn in the box plot.
    pub fn overall_stats(&self) -> Vec<StatsRecord> {
        self.stats.iter().filter(|r| r.group == "Overall").cloned().collect()
    }

    pub fn curves_for(&self, group: &str) -> Vec<(&str, &PoapCurve)> {
        self.curves
            .iter()
            .filter(|g| g.group == group)
            .filter_map(|g| g.curve.as_ref().ok().map(|c| (g.model.as_str(), c)))
            .collect()
    }
}

/// Row order for the reliability table: fewer distinct interaction kinds
/// first, then fewer interactions, then encounter-heavy before
/// overtaking-heavy.
pub fn label_order(l: &TrafficSituationLabel) -> (u32, u32, std::cmp::Reverse<(u32, u32, u32)>) {
    let distinct = [l.encounter, l.overtaking, l.overtaken].iter().filter(|c| **c > 0).count() as u32;
    (distinct, l.encounter + l.overtaking + l.overtaken, std::cmp::Reverse((l.encounter, l.overtaking, l.overtaken)))
}

/// Evaluates every model found in `samples`. Each sample must carry a label.
pub fn evaluate(samples: &[PredictionSample], opts: &PoapOptions) -> Result<Evaluation> {
    if samples.is_empty() {
        return Err(Error::NoRecords);
    }
    let mut by_model: BTreeMap<&str, Vec<(&PredictionSample, TrafficSituationLabel)>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for s in samples {
        s.validate()?;
        let label = s
            .label
            .ok_or_else(|| Error::InvalidInput(format!("sample {} ({}) has no traffic label", s.sample_id, s.model)))?;
        if !seen.insert((s.model.as_str(), s.sample_id.as_str())) {
            return Err(Error::InvalidInput(format!("duplicate sample {} for model {}", s.sample_id, s.model)));
        }
        by_model.entry(&s.model).or_default().push((s, label));
    }
    let models: Vec<String> = by_model.keys().map(|m| m.to_string()).collect();
    let steps = samples.iter().map(PredictionSample::output_length).max().unwrap_or(0);
    let table_horizon = steps as f64;

    let labels: BTreeSet<TrafficSituationLabel> = by_model.values().flatten().map(|(_, l)| *l).collect();
    let mut fine: Vec<TrafficSituationLabel> = labels.into_iter().collect();
    fine.sort_by_key(label_order);

    let coarse_groups: Vec<GroupFilter> =
        std::iter::once(GroupFilter::Overall).chain(CoarseGroup::ALL.iter().map(|g| GroupFilter::Coarse(*g))).collect();
    let stat_groups: Vec<GroupFilter> =
        coarse_groups.iter().copied().chain(fine.iter().map(|l| GroupFilter::Label(*l))).collect();
    let curve_groups: Vec<GroupFilter> =
        fine.iter().map(|l| GroupFilter::Label(*l)).chain(std::iter::once(GroupFilter::Overall)).collect();

    let mut stats = Vec::new();
    let mut curves = Vec::new();
    for (model, rows) in &by_model {
        let coarse: Vec<(TrafficSituationLabel, ErrorSeries)> =
            rows.iter().map(|(s, l)| (*l, step_errors(s))).collect();
        let dense: Vec<(TrafficSituationLabel, ErrorSeries)> = rows.iter().map(|(s, l)| (*l, densify_3s(s))).collect();
        for group in &stat_groups {
            for k in 1..=steps {
                let h = k as f64;
                let values: Vec<f64> =
                    coarse.iter().filter(|(l, _)| group.matches(l)).filter_map(|(_, e)| e.at(h)).collect();
                stats.push(StatsRecord {
                    model: model.to_string(),
                    group: group.name(),
                    horizon_min: h,
                    stats: summarize(&values).ok(),
                });
            }
        }
        for group in &curve_groups {
            let series: Vec<ErrorSeries> =
                dense.iter().filter(|(l, _)| group.matches(l)).map(|(_, e)| e.clone()).collect();
            let curve = if series.is_empty() {
                Err("insufficient data: no samples".to_string())
            } else {
                build_poap_curve(&series, opts).map_err(|e| format!("insufficient data: {e}"))
            };
            curves.push(GroupCurve { model: model.to_string(), group: group.name(), n: series.len(), curve });
        }
    }

    let count = |group: &GroupFilter| -> usize {
        samples
            .iter()
            .filter(|s| s.label.as_ref().is_some_and(|l| group.matches(l)))
            .map(|s| s.sample_id.as_str())
            .collect::<BTreeSet<_>>()
            .len()
    };
    let stats_table = StatsTable {
        horizon_min: table_horizon,
        models: models.clone(),
        rows: coarse_groups
            .iter()
            .map(|g| StatsTableRow {
                group: g.name(),
                n: count(g),
                cells: models
                    .iter()
                    .map(|m| {
                        stats
                            .iter()
                            .find(|r| &r.model == m && r.group == g.name() && r.horizon_min == table_horizon)
                            .and_then(|r| r.stats)
                    })
                    .collect(),
            })
            .collect(),
    };
    let horizon_table = HorizonTable {
        h_max: opts.h_max,
        models: models.clone(),
        rows: curve_groups
            .iter()
            .map(|g| HorizonTableRow {
                group: g.name(),
                n: count(g),
                cells: models
                    .iter()
                    .map(|m| {
                        curves
                            .iter()
                            .find(|c| &c.model == m && c.group == g.name())
                            .and_then(|c| c.curve.as_ref().ok().map(|c| c.a90_95))
                    })
                    .collect(),
            })
            .collect(),
    };
    Ok(Evaluation { models, stats, stats_table, curves, horizon_table })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemoOptions {
    pub seed: u64,
    pub scenes: u32,
    pub windows_per_scene: u32,
}

impl Default for DemoOptions {
    fn default() -> Self {
        Self { seed: 42, scenes: 40, windows_per_scene: 12 }
    }
}

pub struct DemoRun {
    pub scenes: Vec<Scene>,
    pub predictions: Vec<PredictionSample>,
    pub evaluation: Evaluation,
}

/// Labelled predictions of both baseline predictors on seeded random scenes.
pub fn demo_predictions(opts: &DemoOptions) -> Result<(Vec<Scene>, Vec<PredictionSample>)> {
    let predictors: [&dyn Predictor; 2] = [&ConstantVelocity, &MeanVelocity];
    let detection = DetectionOptions::default();
    let mut scenes = Vec::new();
    let mut predictions = Vec::new();
    for k in 0..u64::from(opts.scenes) {
        let spec = random_scenario_spec(opts.seed.wrapping_add(k), opts.windows_per_scene);
        let scene = generate_scene(&spec)?;
        for sample in &scene.samples {
            let label = label_sample(sample, &spec.river_axis, &detection);
            for p in predictors {
                let mut pred = p.predict(sample);
                pred.label = Some(label);
                predictions.push(pred);
            }
        }
        scenes.push(scene);
    }
    Ok((scenes, predictions))
}

pub fn run_demo(demo: &DemoOptions, opts: &PoapOptions) -> Result<DemoRun> {
    let (scenes, predictions) = demo_predictions(demo)?;
    let evaluation = evaluate(&predictions, opts)?;
    Ok(DemoRun { scenes, predictions, evaluation })
}
