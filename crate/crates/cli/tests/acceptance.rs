//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use podreliab_core::metrics::{
    densify_3s, displacement_error, quantile_sorted, step_errors, summarize, PredictionSample,
};
use podreliab_core::normal;
use podreliab_core::pod::{
    build_poap_curve, fit_mle, poap, solve_a_at_probability, wald_lower_bound, AxisTransform, LevelData, PoapOptions,
    RegressionFit, ReliableHorizon,
};
use podreliab_core::scenario::{generate_scene, random_scenario_spec, simulate_errors, SyntheticErrorSpec};
use podreliab_core::traffic::{detect_interactions, DetectionOptions, InteractionKind};
use podreliab_core::trajectory::{resample, RiverAxis, SequenceSample, TrackPoint, Trajectory};

type EventsById = BTreeMap<String, (InteractionKind, i64)>;
type Criterion = fn() -> Outcome;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, format!("took {elapsed:?}, limit {limit:?}"))
}

fn reference_spec(seed: u64) -> SyntheticErrorSpec {
    SyntheticErrorSpec {
        b: 3.0,
        m: 9.0,
        tau: 2.0,
        levels: (1..=5).map(f64::from).collect(),
        samples_per_level: 500,
        seed,
    }
}

fn scatter_fit(seed: u64) -> RegressionFit {
    let series = simulate_errors(&reference_spec(seed)).unwrap();
    fit_mle(&LevelData::scatter_from_series(&series).unwrap(), AxisTransform::LINEAR_LINEAR).unwrap()
}

fn regression_recovery() -> Outcome {
    let start = Instant::now();
    let f = scatter_fit(20_240_101);
    let elapsed = start.elapsed();
    check((f.b - 3.0).abs() <= 0.5, format!("b = {}", f.b))?;
    check((f.m - 9.0).abs() <= 0.5, format!("m = {}", f.m))?;
    check((f.tau - 2.0).abs() <= 0.3, format!("tau = {}", f.tau))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("b={:.4} m={:.4} tau={:.4} in {elapsed:?}", f.b, f.m, f.tau))
}

fn analytic_a90() -> Outcome {
    let start = Instant::now();
    let fit = RegressionFit::from_parameters(0.0, 10.0, 2.0, [[0.0; 3]; 3], AxisTransform::LINEAR_LINEAR);
    let a = solve_a_at_probability(|a| poap(&fit, 20.0, a), 0.9, 5.0).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let ReliableHorizon::Within(a) = a else { return Err(format!("unexpected {a:?}")) };
    check((a - 1.74369).abs() <= 1e-5, format!("a90 = {a}"))?;
    within(elapsed, Duration::from_millis(100))?;
    Ok(format!("a90={a:.6} in {elapsed:?}"))
}

fn wald_coverage() -> Outcome {
    let start = Instant::now();
    let a90_true = (20.0 - 3.0 - 2.0 * 1.281_551_565_545) / 9.0;
    let truth = normal::cdf((20.0 - 3.0 - 9.0 * a90_true) / 2.0);
    let reps = 1000;
    let covered = (0..reps)
        .filter(|r| {
            let fit = scatter_fit(1_000 + r);
            wald_lower_bound(&fit, 20.0, a90_true, 0.95).unwrap() <= truth
        })
        .count();
    let elapsed = start.elapsed();
    let rate = covered as f64 / reps as f64;
    check(rate >= 0.93, format!("coverage {rate}"))?;
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("coverage {covered}/{reps} in {elapsed:?}"))
}

/// Least squares through centred sums, with the MLE covariance written out
/// term by term.
fn closed_form(x: &[f64], y: &[f64]) -> [f64; 6] {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - xm).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let m = sxy / sxx;
    let b = ym - m * xm;
    let sse: f64 = x.iter().zip(y).map(|(a, v)| (v - b - m * a).powi(2)).sum();
    let t2 = sse / n;
    [b, m, t2.sqrt(), t2 * (1.0 / n + xm * xm / sxx), t2 / sxx, -t2 * xm / sxx]
}

fn closed_form_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = rng.random_range(3..40);
        let mut x: Vec<f64> = Vec::with_capacity(n);
        let mut a = rng.random_range(0.05..1.0);
        for _ in 0..n {
            x.push(a);
            a += rng.random_range(0.05..1.0);
        }
        let (b, m) = (rng.random_range(-5.0..5.0), rng.random_range(-10.0..10.0));
        let y: Vec<f64> = x.iter().map(|a| b + m * a + rng.random_range(-3.0..3.0)).collect();
        let fit = fit_mle(&LevelData::new(x.clone(), y.clone()).unwrap(), AxisTransform::LINEAR_LINEAR).unwrap();
        let want = closed_form(&x, &y);
        let got = [fit.b, fit.m, fit.tau, fit.covariance[0][0], fit.covariance[1][1], fit.covariance[0][1]];
        for (g, w) in got.iter().zip(want) {
            worst = worst.max((g - w).abs());
            check((g - w).abs() <= 1e-9, format!("case {case}: {g} vs {w}"))?;
        }
        check(
            (fit.covariance[2][2] - want[2].powi(2) / (2.0 * n as f64)).abs() <= 1e-9,
            format!("case {case}: var(tau)"),
        )?;
    }
    Ok(format!("100 level sets, max deviation {worst:.2e}"))
}

/// Exhaustive scan on the minute grid from the anchor to the last output
/// step, reading neighbour positions at exact timestamps.
fn oracle_events(sample: &SequenceSample, axis: &RiverAxis) -> BTreeMap<String, (InteractionKind, i64)> {
    let [ax, ay] = axis.components();
    let along = |p: &TrackPoint| p.easting * ax + p.northing * ay;
    let grid = &sample.ego.points[sample.input_length - 1..];
    let dir = if along(&grid[grid.len() - 1]) >= along(&grid[0]) { 1.0 } else { -1.0 };
    let mut out = BTreeMap::new();
    for nb in &sample.neighbors {
        let by_time: BTreeMap<i64, &TrackPoint> = nb.points.iter().map(|p| (p.timestamp, p)).collect();
        let pairs: Vec<(&TrackPoint, &TrackPoint)> =
            grid.iter().filter_map(|e| by_time.get(&e.timestamp).map(|n| (e, *n))).collect();
        if pairs.len() < 2 {
            continue;
        }
        let signs: Vec<i32> = pairs
            .iter()
            .map(|(e, n)| {
                let d = dir * (along(e) - along(n));
                if d > 0.0 {
                    1
                } else if d < 0.0 {
                    -1
                } else {
                    0
                }
            })
            .collect();
        let Some(first) = signs.iter().position(|s| *s != 0) else { continue };
        let Some(k) = (first + 1..signs.len()).find(|&k| signs[k] != signs[first]) else { continue };
        let moved = along(pairs[pairs.len() - 1].1) - along(pairs[0].1);
        let kind = if moved.abs() < 50.0 || moved.signum() != dir {
            InteractionKind::Encounter
        } else if signs[first] < 0 {
            InteractionKind::Overtaking
        } else {
            InteractionKind::Overtaken
        };
        out.insert(nb.vessel_id.clone(), (kind, pairs[k].0.timestamp));
    }
    out
}

fn classifier_oracle() -> Outcome {
    let opts = DetectionOptions::default();
    let (mut samples, mut events, mut scheduled) = (0, 0, 0);
    for seed in 0..200u64 {
        let spec = random_scenario_spec(seed, 6);
        let scene = generate_scene(&spec).map_err(|e| e.to_string())?;
        let mut found: Vec<(i64, i64, EventsById)> = Vec::new();
        for s in &scene.samples {
            let got: BTreeMap<String, (InteractionKind, i64)> = detect_interactions(s, &spec.river_axis, &opts)
                .into_iter()
                .map(|e| (e.neighbor_id, (e.kind, e.event_time)))
                .collect();
            let want = oracle_events(s, &spec.river_axis);
            check(got == want, format!("seed {seed}, sample {}: {got:?} vs {want:?}", s.sample_id))?;
            samples += 1;
            events += got.len();
            let (lo, hi) = s.prediction_span();
            found.push((lo, hi, got));
        }
        for (i, e) in spec.events.iter().enumerate() {
            let t = spec.start_time as f64 + e.time_min * 60.0;
            let (_, _, got) = found
                .iter()
                .find(|(lo, hi, _)| t > *lo as f64 && t <= *hi as f64)
                .ok_or_else(|| format!("seed {seed}: no window holds event {i}"))?;
            let hit = got.iter().any(|(id, (kind, time))| {
                id.ends_with(&format!("-{i}-{}", e.kind)) && *kind == e.kind && (*time as f64 - t).abs() <= 60.0
            });
            check(hit, format!("seed {seed}: event {i} ({}) at {} min not recovered", e.kind, e.time_min))?;
            scheduled += 1;
        }
    }
    Ok(format!("200 scenes, {samples} samples, {events} events agree; {scheduled} scheduled events recovered"))
}

fn attr_lists(svg: &str, tag: &str) -> Vec<BTreeMap<String, String>> {
    svg.split(&format!("<{tag} "))
        .skip(1)
        .map(|chunk| {
            let head = &chunk[..chunk.find('>').unwrap_or(chunk.len())];
            let mut map = BTreeMap::new();
            let mut rest = head;
            while let Some(eq) = rest.find("=\"") {
                let key = rest[..eq].trim().to_string();
                let after = &rest[eq + 2..];
                let end = after.find('"').unwrap();
                map.insert(key, after[..end].to_string());
                rest = &after[end + 1..];
            }
            map
        })
        .collect()
}

fn read_csv(path: &Path) -> Vec<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines.map(|l| header.iter().zip(l.split(',')).map(|(h, v)| (h.to_string(), v.to_string())).collect()).collect()
}

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_podreliab")).args(args).output().map_err(|e| e.to_string())?;
    check(out.status.success(), format!("podreliab {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(out)
}

fn pipeline_shape() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path();
    run_cli(&["demo", "--out", root.to_str().unwrap(), "--seed", "42"])?;
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root.join("poap_summary.json")).unwrap()).unwrap();
    let table = std::fs::read_to_string(root.join("table_a90_95.md")).unwrap();
    let mut curves = 0;
    let mut censored = 0;
    for c in summary["curves"].as_array().unwrap() {
        let (model, label) = (c["model"].as_str().unwrap(), c["label"].as_str().unwrap());
        let csv =
            read_csv(&root.join(format!("poap/{}/{}.csv", podreliab_cli::slug(model), podreliab_cli::slug(label))));
        let p: Vec<f64> = csv.iter().map(|r| r["p"].parse().unwrap()).collect();
        let lo: Vec<f64> = csv.iter().map(|r| r["p_lower95"].parse().unwrap()).collect();
        check(p.windows(2).all(|w| w[1] <= w[0]), format!("{model}/{label}: POAP increases"))?;
        check(lo.windows(2).all(|w| w[1] <= w[0]), format!("{model}/{label}: lower bound increases"))?;
        check(p.iter().zip(&lo).all(|(p, l)| l <= p), format!("{model}/{label}: bound above estimate"))?;
        let (s90, s95) = (c["a90_status"].as_str().unwrap(), c["a90_95_status"].as_str().unwrap());
        if s90 == "within" && s95 == "within" {
            check(c["a90_95"].as_f64() <= c["a90"].as_f64(), format!("{model}/{label}: a90/95 > a90"))?;
        }
        if c["censored"].as_bool().unwrap() {
            censored += 1;
            let row = table
                .lines()
                .find(|l| l.to_lowercase().starts_with(&format!("| {} (", label.to_lowercase())))
                .ok_or_else(|| format!("no table row for {label}"))?;
            check(row.contains("| > 5"), format!("censored {label} not rendered as > 5: {row}"))?;
        }
        curves += 1;
    }
    check(censored > 0 && curves > 0, "demo has no censored group")?;

    let mut figures = 0;
    // Box plot against its CSV.
    let boxes = attr_lists(&std::fs::read_to_string(root.join("fig_boxplot.svg")).unwrap(), "g");
    let boxes: Vec<_> = boxes.into_iter().filter(|b| b.get("class").map(String::as_str) == Some("box")).collect();
    let rows = read_csv(&root.join("fig_boxplot.csv"));
    check(boxes.len() == rows.len(), "box count differs from CSV rows")?;
    for (b, r) in boxes.iter().zip(&rows) {
        for (attr, col) in [
            ("data-model", "model"),
            ("data-group", "group"),
            ("data-horizon-min", "horizon_min"),
            ("data-n", "n"),
            ("data-mean", "mean"),
            ("data-median", "median"),
            ("data-std", "std"),
            ("data-q1", "q1"),
            ("data-q3", "q3"),
            ("data-wlow", "wlow"),
            ("data-whigh", "whigh"),
        ] {
            check(b[attr] == r[col], format!("box plot {attr}: {} vs {}", b[attr], r[col]))?;
        }
    }
    figures += 1;
    // POAP figures against the per-curve CSVs.
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let Some(group) = name.strip_prefix("fig_poap_").and_then(|n| n.strip_suffix(".svg")) else { continue };
        let lines = attr_lists(&std::fs::read_to_string(&path).unwrap(), "polyline");
        check(!lines.is_empty(), format!("{name} has no curves"))?;
        for l in &lines {
            let csv = read_csv(&root.join(format!("poap/{}/{group}.csv", podreliab_cli::slug(&l["data-model"]))));
            let col = if l["data-kind"] == "p" { "p" } else { "p_lower95" };
            let a: Vec<&str> = csv.iter().map(|r| r["a_min"].as_str()).collect();
            let v: Vec<&str> = csv.iter().map(|r| r[col].as_str()).collect();
            check(
                l["data-a"] == a.join(" ") && l["data-values"] == v.join(" "),
                format!("{name}: {} differs", l["data-model"]),
            )?;
        }
        figures += 1;
    }
    // Scene figure against the scene CSV.
    let tracks = attr_lists(&std::fs::read_to_string(root.join("fig_scene.svg")).unwrap(), "polyline");
    let scene = read_csv(&root.join("scene.csv"));
    for t in &tracks {
        let pts: Vec<_> = scene.iter().filter(|r| r["vessel_id"] == t["data-vessel"]).collect();
        let col = |c: &str| pts.iter().map(|r| r[c].as_str()).collect::<Vec<_>>().join(" ");
        check(
            t["data-t"] == col("timestamp")
                && t["data-easting"] == col("easting")
                && t["data-northing"] == col("northing"),
            format!("scene track {} differs", t["data-vessel"]),
        )?;
    }
    check(
        tracks.len() == scene.iter().map(|r| &r["vessel_id"]).collect::<std::collections::BTreeSet<_>>().len(),
        "scene vessels",
    )?;
    figures += 1;
    Ok(format!("{curves} curves ({censored} censored), {figures} figures match their CSV"))
}

fn metric_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pt = || [rng.random_range(-1e4..1e4), rng.random_range(-1e4..1e4)];
    for _ in 0..10_000 {
        let (a, b, c) = (pt(), pt(), pt());
        let (ab, ba, bc, ac) =
            (displacement_error(a, b), displacement_error(b, a), displacement_error(b, c), displacement_error(a, c));
        check(ab >= 0.0 && displacement_error(a, a) == 0.0 && ab == ba, "non-negativity, identity or symmetry")?;
        check(ac <= ab + bc + 1e-9, "triangle inequality")?;
        check((ab > 0.0) == (a != b), "zero iff equal")?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..500 {
        let steps = rng.random_range(1..8);
        let mut walk = |scale: f64| -> Vec<[f64; 2]> {
            (0..steps).map(|_| [rng.random_range(-scale..scale), rng.random_range(-scale..scale)]).collect()
        };
        let sample = PredictionSample {
            sample_id: i.to_string(),
            model: "m".into(),
            anchor: [0.0, 0.0],
            truth: walk(300.0),
            predicted: walk(300.0),
            label: None,
        };
        let coarse = step_errors(&sample);
        let dense = densify_3s(&sample);
        for (h, e) in coarse.horizons.iter().zip(&coarse.errors) {
            let d = dense.at(*h).ok_or("missing grid time")?;
            check((d - e).abs() <= 1e-9, format!("densified {d} vs {e} at {h}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..300 {
        let mut t = rng.random_range(0..120);
        let pts: Vec<TrackPoint> = (0..rng.random_range(2..30))
            .map(|_| {
                t += rng.random_range(1..150);
                TrackPoint::new("v", t, rng.random_range(-1e3..1e3), rng.random_range(-1e3..1e3))
            })
            .collect();
        let traj = Trajectory::new("v", pts, 0).unwrap();
        if let Some(r) = resample(&traj, 60) {
            check(resample(&r, 60).as_ref() == Some(&r), format!("resample not idempotent on case {i}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..1000 {
        let n = rng.random_range(1..60);
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-100.0..100.0)).collect();
        let stats = summarize(&v).unwrap();
        v.sort_by(f64::total_cmp);
        // Type 7: h = (n - 1) p, interpolate between floor(h) and ceil(h).
        let oracle = |p: f64| {
            let h = (n - 1) as f64 * p;
            let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        for (p, got) in [(0.25, stats.q1), (0.5, stats.median), (0.75, stats.q3)] {
            check((got - oracle(p)).abs() <= 1e-9, format!("quantile {p}: {got} vs {}", oracle(p)))?;
            check((quantile_sorted(&v, p) - oracle(p)).abs() <= 1e-9, "quantile_sorted")?;
        }
    }
    Ok("10^4 metric triples, 500 densified samples, 300 resamples, 1000 quantile sets".into())
}

fn scale_equivariance() -> Outcome {
    let spec = SyntheticErrorSpec { samples_per_level: 200, ..reference_spec(77) };
    let base = simulate_errors(&spec).unwrap();
    let scaled: Vec<_> = base
        .iter()
        .map(|s| {
            podreliab_core::metrics::ErrorSeries::new(s.horizons.clone(), s.errors.iter().map(|e| e * 7.3).collect())
                .unwrap()
        })
        .collect();
    let opts = PoapOptions { transform: Some(AxisTransform::LINEAR_LINEAR), ..Default::default() };
    let a = build_poap_curve(&base, &opts).map_err(|e| e.to_string())?;
    let b = build_poap_curve(&scaled, &PoapOptions { threshold_m: 20.0 * 7.3, ..opts }).map_err(|e| e.to_string())?;
    for (x, y, name) in [(a.a90, b.a90, "a90"), (a.a90_95, b.a90_95, "a90/95")] {
        check(matches!(x, ReliableHorizon::Within(_)), format!("{name} not inside the range: {x:?}"))?;
        check(x.status() == y.status() && (x.value() - y.value()).abs() <= 1e-9, format!("{name}: {x:?} vs {y:?}"))?;
    }
    Ok(format!(
        "a90 {:.9} / {:.9}, a90/95 {:.9} / {:.9}",
        a.a90.value(),
        b.a90.value(),
        a.a90_95.value(),
        b.a90_95.value()
    ))
}

fn report_fidelity() -> Outcome {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("run.json");
    let cfg = serde_json::json!({
        "predictions": fixtures.join("report_predictions.jsonl"),
        "labels": fixtures.join("report_labels.csv"),
        "out_dir": dir.path().join("out"),
    });
    std::fs::write(&config, cfg.to_string()).unwrap();
    run_cli(&["evaluate", "--config", config.to_str().unwrap()])?;
    let stats = std::fs::read_to_string(dir.path().join("out/table_stats.md")).unwrap();
    for row in [
        "| Overall (6) | 18.33* (15, 13.14*) | 20.33 (14*, 17.07) |",
        "| Encounter (3) | 20* (20, 8.16*) | 25 (20, 18.71) |",
        "| Overtaking (0) | insufficient data | insufficient data |",
        "| Overtaken (1) | 40 (40, 0) | 35* (35*, 0) |",
        "| no-interaction (2) | 5* (5*, 1*) | 6 (6, 2) |",
    ] {
        check(stats.lines().any(|l| l == row), format!("missing row `{row}` in\n{stats}"))?;
    }
    let horizons = std::fs::read_to_string(dir.path().join("out/table_a90_95.md")).unwrap();
    let rows: Vec<&str> = horizons.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| Situation")).collect();
    let names: Vec<&str> = rows.iter().map(|r| r.split(" | ").next().unwrap()).collect();
    check(
        names == ["| No-interaction (2)", "| Encounter-1 (3)", "| Overtaken-1 (1)", "| Overall (6)"],
        format!("row layout {names:?}"),
    )?;
    check(rows.iter().any(|r| r.contains('*')) && rows.iter().any(|r| r.contains('†')), "no */† markers")?;
    for r in &rows {
        let cells: Vec<&str> = r.trim_matches('|').split('|').map(str::trim).skip(1).collect();
        let starred = cells.iter().filter(|c| c.ends_with('*')).count();
        let daggered = cells.iter().filter(|c| c.ends_with('†')).count();
        check(starred == daggered, format!("unbalanced markers in {r}"))?;
    }
    Ok(format!("{} stats rows exact; {} a90/95 rows with markers and counts", 5, rows.len()))
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("regression recovery", regression_recovery),
        ("analytic a90", analytic_a90),
        ("Wald coverage", wald_coverage),
        ("closed-form equivalence", closed_form_equivalence),
        ("classifier oracle", classifier_oracle),
        ("pipeline shape", pipeline_shape),
        ("metric and interpolation suite", metric_suite),
        ("scale equivariance", scale_equivariance),
        ("report fidelity", report_fidelity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: panicked", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
