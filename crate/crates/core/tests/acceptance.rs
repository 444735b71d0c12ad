//! Acceptance checks. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use tsml::benchmark::{
    friedman_test, mase, parse_dataset, serialize_dataset, sign_test, smape, Dataset,
};
use tsml::classification::{
    KnnTimeSeriesClassifier, TimeSeriesClassifier, TimeSeriesForest, TsfParams,
};
use tsml::composition::{temporal_split, SplitMethod, SplitSpec};
use tsml::data::{Cell, Panel, TimeSeries};
use tsml::distances::{dtw_distance, DistanceSpec};
use tsml::estimator::{ForecastingHorizon, Label};
use tsml::forecasting::{
    naive_forecast, ExponentialSmoothingForecaster, Forecaster, NaiveStrategy,
    ReducedRegressionForecaster, ReductionConfig, ReductionMethod,
};
use tsml::random::rng_from;
use tsml::tabular::LinearRegression;
use tsml::transformers::{detrend_inverse, detrend_transform, detrender_fit, TrendSpec};
use tsml::Error;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn series(values: Vec<f64>) -> TimeSeries {
    TimeSeries::from_values(values).expect("finite values")
}

/// Minimum squared-cost alignment over every monotone, continuous path from
/// (0, 0) to (m−1, n−1), enumerated recursively.
fn exhaustive_dtw(x: &[f64], y: &[f64]) -> f64 {
    fn walk(x: &[f64], y: &[f64], i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + (x[i] - y[j]).powi(2);
        if i == x.len() - 1 && j == y.len() - 1 {
            *best = best.min(acc);
            return;
        }
        if i + 1 < x.len() {
            walk(x, y, i + 1, j, acc, best);
        }
        if j + 1 < y.len() {
            walk(x, y, i, j + 1, acc, best);
        }
        if i + 1 < x.len() && j + 1 < y.len() {
            walk(x, y, i + 1, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(x, y, 0, 0, 0.0, &mut best);
    best
}

fn dtw_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from(20);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m = rng.random_range(1..=6);
        let n = rng.random_range(1..=6);
        let x: Vec<f64> = (0..m).map(|_| rng.random_range(0..3) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..3) as f64).collect();
        let dp = dtw_distance(&x, &y, None).map_err(|e| e.to_string())?;
        let oracle = exhaustive_dtw(&x, &y);
        worst = worst.max((dp - oracle).abs());
        check((dp - oracle).abs() <= 1e-9, format!("{x:?} vs {y:?}: dp {dp}, oracle {oracle}"))?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("200 pairs, max |dp - oracle| = {worst:e}, {elapsed:?}"))
}

fn reduction_exactness() -> Outcome {
    let y = series((1..=20).map(f64::from).collect());
    let config = |method| ReductionConfig {
        window_length: 3,
        method,
    };
    let fh = ForecastingHorizon::steps_ahead(10).map_err(|e| e.to_string())?;
    let mut rec = ReducedRegressionForecaster::new(Box::new(LinearRegression::new()), config(ReductionMethod::Recursive));
    rec.fit(&y, None).map_err(|e| e.to_string())?;
    let pred = rec.predict(&fh).map_err(|e| e.to_string())?;
    let err = pred
        .values()
        .iter()
        .zip(21..=30)
        .map(|(p, t)| (p - f64::from(t)).abs())
        .fold(0.0, f64::max);
    check(err <= 1e-8, format!("max error {err:e} over steps 1..10"))?;

    let one = ForecastingHorizon::steps_ahead(1).map_err(|e| e.to_string())?;
    let mut direct = ReducedRegressionForecaster::new(Box::new(LinearRegression::new()), config(ReductionMethod::Direct));
    direct.fit(&y, Some(&one)).map_err(|e| e.to_string())?;
    let d = direct.predict(&one).map_err(|e| e.to_string())?;
    let r = rec.predict(&one).map_err(|e| e.to_string())?;
    check(d == r, format!("direct {:?} vs recursive {:?}", d.values(), r.values()))?;
    Ok(format!("max error {err:e}; direct == recursive at fh=[1]"))
}

fn detrender_round_trip() -> Outcome {
    let mut rng = rng_from(3);
    let noise = Normal::new(0.0, 1.0).expect("valid normal");
    let mut level = 0.0;
    let walk: Vec<f64> = (0..60)
        .map(|_| {
            level += noise.sample(&mut rng);
            level
        })
        .collect();
    let full = series(walk);
    let train = full.slice(0, 50).map_err(|e| e.to_string())?;
    let future = full.slice(50, 60).map_err(|e| e.to_string())?;
    let state = detrender_fit(&train, &TrendSpec::Polynomial(2)).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for y in [&train, &future] {
        let back = detrend_inverse(&state, &detrend_transform(&state, y).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        check(back.times() == y.times(), "index changed")?;
        for (a, b) in back.values().iter().zip(y.values()) {
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= 1e-9, format!("max error {worst:e}"))?;
    Ok(format!("50 in-sample + 10 future points, max error {worst:e}"))
}

fn ses_degeneracy() -> Outcome {
    let mut rng = rng_from(4);
    let fh = ForecastingHorizon::steps_ahead(5).map_err(|e| e.to_string())?;
    for i in 0..100 {
        let len = rng.random_range(2..40);
        let y = series((0..len).map(|_| rng.random_range(-100.0..100.0)).collect());
        let mut ses = ExponentialSmoothingForecaster::ses(Some(1.0));
        ses.fit(&y, None).map_err(|e| e.to_string())?;
        let a = ses.predict(&fh).map_err(|e| e.to_string())?;
        let b = naive_forecast(&y, &fh, NaiveStrategy::Last).map_err(|e| e.to_string())?;
        check(a == b, format!("series {i}: {:?} vs {:?}", a.values(), b.values()))?;
    }
    Ok("100 series, forecasts identical".into())
}

fn level_shift(n_per_class: usize, t: usize, rng: &mut impl Rng) -> (Panel, Vec<Label>) {
    let noise = Normal::new(0.0, 1.0).expect("valid normal");
    let mut cells = Vec::new();
    let mut labels = Vec::new();
    for i in 0..2 * n_per_class {
        let level = (i % 2) as f64;
        cells.push(series((0..t).map(|_| level + noise.sample(rng)).collect()));
        labels.push(if level == 0.0 { "base" } else { "shifted" }.to_string());
    }
    (Panel::from_series("x", cells).expect("valid panel"), labels)
}

fn accuracy(truth: &[Label], pred: &[Label]) -> f64 {
    truth.iter().zip(pred).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

fn tsf_accuracy() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from(1);
    let (train, y_train) = level_shift(20, 50, &mut rng);
    let (test, y_test) = level_shift(20, 50, &mut rng);
    let mut tsf = TimeSeriesForest::new(TsfParams {
        n_trees: 100,
        seed: 1,
        ..TsfParams::default()
    });
    tsf.fit(&train, &y_train).map_err(|e| e.to_string())?;
    let acc = accuracy(&y_test, &tsf.predict(&test).map_err(|e| e.to_string())?);
    let elapsed = start.elapsed();
    check(acc >= 0.90, format!("test accuracy {acc:.3}"))?;
    check(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("test accuracy {acc:.3}, {elapsed:?}"))
}

fn template(kind: &str, phase: f64, t: usize) -> Vec<f64> {
    (0..t)
        .map(|i| {
            let s = (2.0 * PI * 8.0 * i as f64 / t as f64 + phase).sin();
            if kind == "sine" {
                s
            } else if s >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

fn knn_dtw_vs_euclid() -> Outcome {
    let mut rng = rng_from(2);
    let t = 128;
    let noise = Normal::new(0.0, 0.1).expect("valid normal");
    let kinds = ["sine", "square"];
    let mut templates = Vec::new();
    let mut y_train = Vec::new();
    for kind in kinds {
        for _ in 0..3 {
            templates.push(series(template(kind, rng.random_range(0.0..2.0 * PI), t)));
            y_train.push(kind.to_string());
        }
    }
    let train = Panel::from_series("x", templates).map_err(|e| e.to_string())?;
    let mut queries = Vec::new();
    let mut y_test = Vec::new();
    for q in 0..50 {
        let kind = kinds[q % 2];
        let phase = rng.random_range(0.0..2.0 * PI);
        let v = template(kind, phase, t).into_iter().map(|v| v + noise.sample(&mut rng)).collect();
        queries.push(series(v));
        y_test.push(kind.to_string());
    }
    let test = Panel::from_series("x", queries).map_err(|e| e.to_string())?;
    let score = |dist: DistanceSpec| -> Result<f64, String> {
        let mut knn = KnnTimeSeriesClassifier::new(1, dist);
        knn.fit(&train, &y_train).map_err(|e| e.to_string())?;
        Ok(accuracy(&y_test, &knn.predict(&test).map_err(|e| e.to_string())?))
    };
    let dtw = score(DistanceSpec::dtw(None).map_err(|e| e.to_string())?)?;
    let euclid = score(DistanceSpec::euclidean())?;
    check(dtw >= 0.95 && dtw > euclid, format!("dtw {dtw:.3}, euclidean {euclid:.3}"))?;
    Ok(format!("dtw {dtw:.3} > euclidean {euclid:.3}"))
}

fn hand_metrics() -> Outcome {
    let s = smape(&[100.0], &[50.0]).map_err(|e| e.to_string())?;
    check((s - 200.0 / 3.0).abs() <= 1e-9, format!("sMAPE {s}"))?;
    let m = mase(&[4.0], &[5.0], &[1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
    check(m == 1.0, format!("MASE {m}"))?;
    let table = vec![vec![0.1; 4], vec![0.2; 4], vec![0.3; 4]];
    let f = friedman_test(&table).map_err(|e| e.to_string())?.statistic;
    check(f == 8.0, format!("Friedman {f}"))?;
    let p = sign_test(&[0.0; 5], &[1.0; 5]).map_err(|e| e.to_string())?.p_value;
    check(p == 0.0625, format!("sign test p {p}"))?;
    Ok(format!("sMAPE {s}, MASE {m}, Friedman {f}, sign p {p}"))
}

fn splitter_contract() -> Outcome {
    let mut combos = 0usize;
    for n in 1..=30usize {
        for w0 in 1..=n {
            for step in 1..=n {
                for fh in 1..=n {
                    for method in [SplitMethod::Expanding, SplitMethod::Sliding] {
                        combos += 1;
                        let spec = SplitSpec::new(method, w0, step, fh).map_err(|e| e.to_string())?;
                        let expected = (0..).take_while(|k| w0 + k * step + fh <= n).count();
                        match temporal_split(n, &spec) {
                            Err(Error::SeriesTooShort { .. }) => {
                                check(w0 + fh > n, format!("n={n} {spec:?}: unexpected SeriesTooShort"))?
                            }
                            Err(e) => return Err(format!("n={n} {spec:?}: {e}")),
                            Ok(folds) => {
                                check(folds.len() == expected, format!("n={n} {spec:?}: {} folds", folds.len()))?;
                                check(
                                    folds.len() == (n - w0 - fh) / step + 1,
                                    format!("n={n} {spec:?}: fold count formula"),
                                )?;
                                for f in &folds {
                                    check(
                                        !f.train.is_empty() && f.train.end - 1 < f.test.start,
                                        format!("n={n} {spec:?}: {f:?}"),
                                    )?;
                                    check(f.test.len() == fh && f.test.end <= n, format!("n={n} {spec:?}: {f:?}"))?;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{combos} combinations"))
}

fn write_dataset(dir: &std::path::Path, name: &str, seed: u64) -> std::path::PathBuf {
    let mut rng = rng_from(seed);
    let mut text = format!("@problemName {name}\n@univariate true\n@classLabel true a b\n@data\n");
    for i in 0..24 {
        let label = ["a", "b"][i % 2];
        let level = if label == "a" { 0.0 } else { 1.5 };
        let values: Vec<String> = (0..20)
            .map(|_| format!("{:?}", level + rng.random_range(-1.0..1.0)))
            .collect();
        text.push_str(&format!("{}:{label}\n", values.join(",")));
    }
    let path = dir.join(format!("{name}.ts"));
    std::fs::write(&path, text).expect("write dataset");
    path
}

fn bench_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d1 = write_dataset(dir.path(), "alpha", 1);
    let d2 = write_dataset(dir.path(), "beta", 2);
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("results_{run}.csv"));
        let config = serde_json::json!({
            "datasets": [d1, d2],
            "strategies": [
                {"name": "tsf", "params": {"n_trees": 10}},
                {"name": "knn-dtw", "params": {"band": 0.2}},
                {"name": "majority"}
            ],
            "folds": 3,
            "metrics": ["accuracy", "error"],
            "seed": 7,
            "out": out,
        });
        let cfg_path = dir.path().join(format!("config_{run}.json"));
        std::fs::write(&cfg_path, config.to_string()).map_err(|e| e.to_string())?;
        let status = Command::new(env!("CARGO_BIN_EXE_tscli"))
            .args(["bench", "--config"])
            .arg(&cfg_path)
            .status()
            .map_err(|e| e.to_string())?;
        check(status.success(), format!("run {run} exited with {status}"))?;
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    check(outputs[0] == outputs[1], "result files differ")?;
    let rows = outputs[0].iter().filter(|&&b| b == b'\n').count() - 1;
    check(rows == 2 * 3 * 3 * 2, format!("{rows} result rows"))?;
    Ok(format!("two runs byte-identical ({} bytes, {rows} rows)", outputs[0].len()))
}

fn random_dataset(rng: &mut impl Rng, id: usize) -> Dataset {
    let dims = rng.random_range(1..=3);
    let n = rng.random_range(1..=8);
    let label_pool = ["a", "b", "class_2", "x9", "Z"];
    let mut columns = vec![Vec::new(); dims];
    let mut labels = Vec::new();
    for _ in 0..n {
        for col in columns.iter_mut() {
            let len = rng.random_range(1..=12);
            let values: Vec<f64> = (0..len)
                .map(|_| match rng.random_range(0..4) {
                    0 => rng.random_range(-10i32..10) as f64,
                    1 => rng.random_range(-1e-8..1e-8),
                    2 => rng.random_range(-1e12..1e12),
                    _ => rng.random_range(-1.0..1.0),
                })
                .collect();
            col.push(Cell::Series(series(values)));
        }
        labels.push(label_pool[rng.random_range(0..label_pool.len())].to_string());
    }
    let panel = Panel::new(
        columns
            .into_iter()
            .enumerate()
            .map(|(d, c)| (format!("dim_{d}"), c))
            .collect(),
    )
    .expect("valid panel");
    let mut declared = labels.clone();
    declared.sort();
    declared.dedup();
    Dataset {
        name: format!("fuzz_{id}"),
        univariate: dims == 1,
        class_labels: Some(declared),
        panel,
        labels,
    }
}

/// Corrupts one line of a valid file; returns the text and the 1-based line
/// that must be reported.
fn corrupt(text: &str, kind: usize, rng: &mut impl Rng) -> (String, usize) {
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let data_start = lines.iter().position(|l| l == "@data").expect("has @data") + 1;
    let target = rng.random_range(data_start..lines.len());
    match kind % 5 {
        0 => {
            // non-numeric value
            let line = &mut lines[target];
            let pos = line.find(|c: char| c.is_ascii_digit()).expect("has a digit");
            line.insert(pos, 'q');
        }
        1 => {
            // ragged dimensions: an extra line with one more dimension
            let line = format!("1.0:{}", lines[target]);
            lines.push(line);
            let last = lines.len();
            return (lines.join("\n") + "\n", last);
        }
        2 => {
            // empty label
            let line = &mut lines[target];
            let cut = line.rfind(':').expect("has a label");
            line.truncate(cut + 1);
        }
        3 => {
            // undeclared label
            let line = &mut lines[target];
            let cut = line.rfind(':').expect("has a label");
            line.truncate(cut + 1);
            line.push_str("undeclared");
        }
        _ => {
            // unknown header before @data
            lines.insert(1, "@bogusHeader 1".into());
            return (lines.join("\n") + "\n", 2);
        }
    }
    (lines.join("\n") + "\n", target + 1)
}

fn parser_round_trip() -> Outcome {
    let mut rng = rng_from(10);
    let mut valid = Vec::new();
    for id in 0..50 {
        let ds = random_dataset(&mut rng, id);
        let text = serialize_dataset(&ds).map_err(|e| e.to_string())?;
        let back = parse_dataset(&text).map_err(|e| format!("fuzz_{id}: {e}"))?;
        check(back == ds, format!("fuzz_{id}: round trip differs"))?;
        valid.push(text);
    }
    for (k, base) in valid.iter().take(20).enumerate() {
        let (bad, line) = corrupt(base, k, &mut rng);
        match parse_dataset(&bad) {
            Err(Error::Parse { line: got, .. }) => {
                check(got == line, format!("malformed file {k}: reported line {got}, expected {line}"))?
            }
            other => return Err(format!("malformed file {k}: expected a parse error, got {other:?}")),
        }
    }
    Ok("50 round trips exact; 20 malformed files rejected at the right line".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("DTW oracle equivalence", dtw_oracle),
        ("reduction exactness", reduction_exactness),
        ("detrender round trip", detrender_round_trip),
        ("SES degeneracy", ses_degeneracy),
        ("TSF synthetic accuracy", tsf_accuracy),
        ("kNN-DTW vs Euclidean", knn_dtw_vs_euclid),
        ("hand-value metrics", hand_metrics),
        ("splitter contract", splitter_contract),
        ("bench determinism", bench_determinism),
        ("parser round trip", parser_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
