use std::collections::BTreeMap;

use podreliab_core::metrics::{read_predictions, write_predictions, PredictionSample};
use podreliab_core::pipeline::{evaluate as run_evaluation, run_demo, DemoOptions, Evaluation};
use podreliab_core::report::{boxplot_svg, poap_svg, scene_svg, write_curve_csv, write_stats_csv};
use podreliab_core::scenario::{generate_scene, ConstantVelocity, MeanVelocity, Predictor, ScenarioSpec, Scene};
use podreliab_core::traffic::{label_sample, read_labels, write_labels, TrafficSituationLabel};
use podreliab_core::trajectory::{
    build_samples, ingest_records, prepare_trajectories, write_records, IngestOutput, SequenceSample, Trajectory,
};
use podreliab_core::Error;
use serde::Serialize;

use crate::artifacts::{slug, Artifacts};
use crate::{CliError, LoadedConfig, RunConfig};

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> podreliab_core::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn require<'a>(path: &'a Option<std::path::PathBuf>, key: &str) -> Result<&'a std::path::Path, CliError> {
    path.as_deref().ok_or_else(|| CliError::Input(format!("config: `{key}` is required for this command")))
}

#[derive(Serialize)]
struct TrajectorySummary<'a> {
    vessel_id: &'a str,
    start: i64,
    end: i64,
    points: usize,
}

#[derive(Serialize)]
struct IngestSummary<'a> {
    #[serde(flatten)]
    report: &'a podreliab_core::trajectory::IngestReport,
    vessels: usize,
    trajectories: Vec<TrajectorySummary<'a>>,
}

fn load_trajectories(cfg: &RunConfig, out: &mut Artifacts) -> Result<(IngestOutput, Vec<Trajectory>), CliError> {
    let bytes = out.read_input(require(&cfg.ais_csv, "ais_csv")?)?;
    let ingested = ingest_records(bytes.as_slice(), &cfg.ingest())?;
    let trajectories = prepare_trajectories(ingested.tracks.values(), &cfg.split());
    Ok((ingested, trajectories))
}

pub fn ingest(loaded: &LoadedConfig) -> Result<(), CliError> {
    let cfg = &loaded.config;
    let mut out = Artifacts::create(&cfg.out_dir)?;
    let (ingested, trajectories) = load_trajectories(cfg, &mut out)?;
    out.write("trajectories.csv", &csv_bytes(|b| write_records(b, trajectories.iter().flat_map(|t| &t.points)))?)?;
    let summary = IngestSummary {
        report: &ingested.report,
        vessels: ingested.tracks.len(),
        trajectories: trajectories
            .iter()
            .map(|t| TrajectorySummary {
                vessel_id: &t.vessel_id,
                start: t.start_time().unwrap_or_default(),
                end: t.end_time().unwrap_or_default(),
                points: t.len(),
            })
            .collect(),
    };
    out.write_json("ingest_report.json", &summary)?;
    let root = out.finish("ingest", &loaded.bytes)?;
    println!(
        "ingested {} rows: {} accepted, {} rejected, {} trajectories -> {}",
        ingested.report.rows_read,
        ingested.report.rows_accepted,
        ingested.report.rejects.len(),
        trajectories.len(),
        root.display()
    );
    for r in &ingested.report.rejects {
        println!("  line {}: {}", r.line, r.reason);
    }
    Ok(())
}

fn label_and_predict(
    samples: &[SequenceSample],
    label: impl Fn(&SequenceSample) -> TrafficSituationLabel,
) -> (Vec<(String, TrafficSituationLabel)>, Vec<PredictionSample>) {
    let predictors: [&dyn Predictor; 2] = [&ConstantVelocity, &MeanVelocity];
    let mut labels = Vec::new();
    let mut predictions = Vec::new();
    for s in samples {
        let l = label(s);
        for p in predictors {
            let mut pred = p.predict(s);
            pred.label = Some(l);
            predictions.push(pred);
        }
        labels.push((s.sample_id.clone(), l));
    }
    (labels, predictions)
}

fn write_scene(out: &mut Artifacts, scene: &Scene, title: &str) -> Result<(), CliError> {
    out.write("scene.csv", &csv_bytes(|b| scene.write_csv(b))?)?;
    out.write("fig_scene.svg", scene_svg(title, &scene.trajectories, &scene.river_axis).as_bytes())
}

/// Labels windows from a scenario (when configured) or from AIS trajectories,
/// and writes baseline predictions for them.
pub fn classify(loaded: &LoadedConfig, seed_override: Option<u64>) -> Result<(), CliError> {
    let cfg = &loaded.config;
    let mut out = Artifacts::create(&cfg.out_dir)?;
    let detection = cfg.detection();
    let (labels, predictions) = if let Some(path) = &cfg.scenario {
        let bytes = out.read_input(path)?;
        let mut spec: ScenarioSpec =
            serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if let Some(seed) = seed_override {
            spec.seed = seed;
        }
        let scene = generate_scene(&spec)?;
        write_scene(&mut out, &scene, &format!("Scenario seed {}", spec.seed))?;
        label_and_predict(&scene.samples, |s| label_sample(s, &spec.river_axis, &detection))
    } else {
        let (_, trajectories) = load_trajectories(cfg, &mut out)?;
        let samples = build_samples(&trajectories, &cfg.river_axis, &cfg.window());
        label_and_predict(&samples, |s| label_sample(s, &cfg.river_axis, &detection))
    };
    out.write("labels.csv", &csv_bytes(|b| write_labels(b, labels.iter().map(|(id, l)| (id.as_str(), l))))?)?;
    out.write("baseline_predictions.jsonl", &csv_bytes(|b| write_predictions(b, &predictions))?)?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for (_, l) in &labels {
        *counts.entry(l.to_string()).or_default() += 1;
    }
    let root = out.finish("classify", &loaded.bytes)?;
    println!("labelled {} samples -> {}", labels.len(), root.display());
    for (label, n) in counts {
        println!("  {label}: {n}");
    }
    Ok(())
}

#[derive(Serialize)]
struct Skipped<'a> {
    model: &'a str,
    label: &'a str,
    n: usize,
    reason: &'a str,
}

#[derive(Serialize)]
struct CurveReport<'a> {
    curves: Vec<podreliab_core::report::PoapSummary>,
    insufficient: Vec<Skipped<'a>>,
}

/// Writes tables, statistics, curves and figures of an evaluation.
pub fn write_evaluation(out: &mut Artifacts, ev: &Evaluation) -> Result<(), CliError> {
    out.write("stats.csv", &csv_bytes(|b| write_stats_csv(b, &ev.stats))?)?;
    let overall = ev.overall_stats();
    out.write("fig_boxplot.csv", &csv_bytes(|b| write_stats_csv(b, &overall))?)?;
    out.write("fig_boxplot.svg", boxplot_svg("Displacement error, all samples", &overall).as_bytes())?;
    out.write("table_stats.md", ev.stats_table.render().as_bytes())?;
    out.write("table_a90_95.md", ev.horizon_table.render().as_bytes())?;

    let mut report = CurveReport { curves: ev.summaries(), insufficient: Vec::new() };
    let mut groups: Vec<&str> = Vec::new();
    for g in &ev.curves {
        match &g.curve {
            Ok(c) => {
                let rel = format!("poap/{}/{}.csv", slug(&g.model), slug(&g.group));
                out.write(&rel, &csv_bytes(|b| write_curve_csv(b, c))?)?;
                if !groups.contains(&g.group.as_str()) {
                    groups.push(&g.group);
                }
            }
            Err(reason) => report.insufficient.push(Skipped { model: &g.model, label: &g.group, n: g.n, reason }),
        }
    }
    for group in groups {
        let svg = poap_svg(&format!("POAP, {group}"), &ev.curves_for(group));
        out.write(&format!("fig_poap_{}.svg", slug(group)), svg.as_bytes())?;
    }
    out.write_json("poap_summary.json", &report)
}

fn attach_labels(
    samples: &mut [PredictionSample],
    labels: &BTreeMap<String, TrafficSituationLabel>,
) -> Result<(), CliError> {
    for s in samples {
        match labels.get(&s.sample_id) {
            Some(l) => s.label = Some(*l),
            None if s.label.is_some() => {}
            None => return Err(CliError::Input(format!("no label for sample {}", s.sample_id))),
        }
    }
    Ok(())
}

pub fn evaluate(loaded: &LoadedConfig) -> Result<(), CliError> {
    let cfg = &loaded.config;
    let mut out = Artifacts::create(&cfg.out_dir)?;
    let bytes = out.read_input(require(&cfg.predictions, "predictions")?)?;
    let mut samples = read_predictions(bytes.as_slice())?;
    if samples.is_empty() {
        return Err(Error::NoRecords.into());
    }
    if let Some(path) = &cfg.labels {
        let labels = read_labels(out.read_input(path)?.as_slice())?;
        attach_labels(&mut samples, &labels)?;
    }
    let ev = run_evaluation(&samples, &cfg.poap())?;
    write_evaluation(&mut out, &ev)?;
    let root = out.finish("evaluate", &loaded.bytes)?;
    print!("{}\n{}", ev.stats_table.render(), ev.horizon_table.render());
    println!("artifacts -> {}", root.display());
    Ok(())
}

pub fn demo(loaded: &LoadedConfig) -> Result<(), CliError> {
    let cfg = &loaded.config;
    let mut out = Artifacts::create(&cfg.out_dir)?;
    let opts = DemoOptions { seed: cfg.seed, scenes: cfg.demo_scenes, windows_per_scene: cfg.demo_windows };
    let run = run_demo(&opts, &cfg.poap())?;
    write_scene(&mut out, &run.scenes[0], &format!("Demo scene, seed {}", cfg.seed))?;
    out.write("predictions.jsonl", &csv_bytes(|b| write_predictions(b, &run.predictions))?)?;
    let mut labels: BTreeMap<&str, TrafficSituationLabel> = BTreeMap::new();
    for p in &run.predictions {
        if let Some(l) = p.label {
            labels.insert(&p.sample_id, l);
        }
    }
    out.write("labels.csv", &csv_bytes(|b| write_labels(b, labels.iter().map(|(id, l)| (*id, l))))?)?;
    write_evaluation(&mut out, &run.evaluation)?;
    let root = out.finish("demo", &loaded.bytes)?;
    print!("{}\n{}", run.evaluation.stats_table.render(), run.evaluation.horizon_table.render());
    println!("artifacts -> {}", root.display());
    Ok(())
}
