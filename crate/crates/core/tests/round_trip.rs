use podreliab_core::metrics::{read_predictions, write_predictions};
use podreliab_core::pipeline::evaluate;
use podreliab_core::pod::PoapOptions;
use podreliab_core::scenario::{generate_scene, random_scenario_spec, ConstantVelocity, Predictor};
use podreliab_core::traffic::{label_sample, DetectionOptions};
use podreliab_core::trajectory::{build_samples, ingest_records, prepare_trajectories, SplitOptions, WindowConfig};

#[test]
fn scene_labels_survive_csv_round_trip() {
    let spec = random_scenario_spec(2024, 10);
    let scene = generate_scene(&spec).unwrap();
    let mut csv = Vec::new();
    scene.write_csv(&mut csv).unwrap();

    let ingested = ingest_records(csv.as_slice(), &Default::default()).unwrap();
    assert!(ingested.report.rejects.is_empty());
    let trajectories = prepare_trajectories(ingested.tracks.values(), &SplitOptions::default());
    // Upstream neighbours are egos of their own windows once reingested.
    let ego = format!("{}:", spec.ego_id());
    let samples: Vec<_> = build_samples(&trajectories, &spec.river_axis, &WindowConfig::default())
        .into_iter()
        .filter(|s| s.sample_id.starts_with(&ego))
        .collect();
    assert_eq!(samples.len(), scene.samples.len());

    let opts = DetectionOptions::default();
    for (a, b) in samples.iter().zip(&scene.samples) {
        assert_eq!(a.sample_id, b.sample_id);
        assert_eq!(label_sample(a, &spec.river_axis, &opts), label_sample(b, &spec.river_axis, &opts));
    }
    let interacting = samples.iter().filter(|s| !label_sample(s, &spec.river_axis, &opts).is_empty()).count();
    assert!(interacting > 0);
}

#[test]
fn predictions_round_trip_into_evaluation() {
    let spec = random_scenario_spec(7, 30);
    let scene = generate_scene(&spec).unwrap();
    let opts = DetectionOptions::default();
    let predictions: Vec<_> = scene
        .samples
        .iter()
        .map(|s| {
            let mut p = ConstantVelocity.predict(s);
            p.label = Some(label_sample(s, &spec.river_axis, &opts));
            p
        })
        .collect();
    let mut jsonl = Vec::new();
    write_predictions(&mut jsonl, &predictions).unwrap();
    let back = read_predictions(jsonl.as_slice()).unwrap();
    assert_eq!(back, predictions);

    let ev = evaluate(&back, &PoapOptions::default()).unwrap();
    assert_eq!(ev.models, vec!["constant-velocity".to_string()]);
    let overall = ev.curves.last().unwrap();
    assert_eq!(overall.group, "Overall");
    assert_eq!(overall.n, predictions.len());
    let table = ev.horizon_table.render();
    assert!(table.contains("| Overall (30) |"), "{table}");
}
