//! Orchestration of classification benchmarks: every (dataset, strategy,
//! fold) item is fitted on a seeded stratified train split and scored on
//! the held-out rest.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Deserialize;

use super::format::{read_dataset, Dataset};
use super::metrics::Metric;
use crate::classification::{ts_classifier_from_name, TimeSeriesClassifier};
use crate::error::{Error, Result};
use crate::estimator::{Label, ParamMap, ParamValue};
use crate::random::{derive_seed_str, rng_from};

fn default_train_fraction() -> f64 {
    0.7
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    /// Name used in result rows; defaults to `name`.
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<PathBuf>,
    pub strategies: Vec<StrategyConfig>,
    pub folds: usize,
    pub metrics: Vec<String>,
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file; relative dataset and output paths are resolved
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for d in config.datasets.iter_mut() {
            if d.is_relative() {
                *d = base.join(&*d);
            }
        }
        if let Some(out) = config.out.as_mut() {
            if out.is_relative() {
                *out = base.join(&*out);
            }
        }
        Ok(config)
    }
}

pub struct Strategy {
    pub label: String,
    pub prototype: Box<dyn TimeSeriesClassifier>,
    /// Whether the config fixed the `seed` parameter; otherwise each item
    /// gets a derived seed.
    seed_fixed: bool,
}

impl Strategy {
    pub fn new(label: &str, prototype: Box<dyn TimeSeriesClassifier>) -> Self {
        Self {
            label: label.to_string(),
            prototype,
            seed_fixed: false,
        }
    }

    fn from_config(cfg: &StrategyConfig) -> Result<Self> {
        let mut prototype = ts_classifier_from_name(&cfg.name)?;
        let mut params = ParamMap::new();
        for (k, v) in &cfg.params {
            let value = ParamValue::from_json(v)
                .ok_or_else(|| Error::Config(format!("parameter `{k}` of `{}` must be a scalar", cfg.name)))?;
            params.insert(k, value).map_err(|e| Error::Config(e.to_string()))?;
        }
        prototype
            .set_params(&params)
            .map_err(|e| Error::Config(format!("strategy `{}`: {e}", cfg.name)))?;
        Ok(Self {
            label: cfg.label.clone().unwrap_or_else(|| cfg.name.clone()),
            prototype,
            seed_fixed: cfg.params.contains_key("seed"),
        })
    }
}

/// A validated experiment, ready to run.
pub struct Experiment {
    pub datasets: Vec<Dataset>,
    pub strategies: Vec<Strategy>,
    pub folds: usize,
    pub metrics: Vec<Metric>,
    pub seed: u64,
    pub train_fraction: f64,
}

impl Experiment {
    pub fn new(
        datasets: Vec<Dataset>,
        strategies: Vec<Strategy>,
        folds: usize,
        metrics: Vec<Metric>,
        seed: u64,
        train_fraction: f64,
    ) -> Result<Self> {
        if datasets.is_empty() || strategies.is_empty() || metrics.is_empty() {
            return Err(Error::Config("datasets, strategies and metrics must be non-empty".into()));
        }
        if folds == 0 {
            return Err(Error::Config("folds must be >= 1".into()));
        }
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::Config(format!("train_fraction {train_fraction} must lie in (0, 1)")));
        }
        if let Some(m) = metrics.iter().find(|m| !m.is_classification()) {
            return Err(Error::Config(format!(
                "metric `{}` does not apply to classification benchmarks",
                m.as_str()
            )));
        }
        let unique = |names: Vec<&str>, what: &str| -> Result<()> {
            let mut seen = BTreeSet::new();
            match names.into_iter().find(|n| !seen.insert(*n)) {
                Some(dup) => Err(Error::Config(format!("duplicate {what} `{dup}`"))),
                None => Ok(()),
            }
        };
        unique(datasets.iter().map(|d| d.name.as_str()).collect(), "dataset")?;
        unique(strategies.iter().map(|s| s.label.as_str()).collect(), "strategy")?;
        unique(metrics.iter().map(|m| m.as_str()).collect(), "metric")?;
        Ok(Self {
            datasets,
            strategies,
            folds,
            metrics,
            seed,
            train_fraction,
        })
    }

    /// Validates names and parameters, then parses every dataset. Data
    /// errors are returned as-is; everything else is a config error.
    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        let strategies = config
            .strategies
            .iter()
            .map(Strategy::from_config)
            .collect::<Result<Vec<_>>>()?;
        let metrics = config
            .metrics
            .iter()
            .map(|m| Metric::parse(m))
            .collect::<Result<Vec<_>>>()?;
        for path in &config.datasets {
            if !path.is_file() {
                return Err(Error::Config(format!("dataset `{}` not found", path.display())));
            }
        }
        let datasets = config
            .datasets
            .iter()
            .map(|p| read_dataset(p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(datasets, strategies, config.folds, metrics, config.seed, config.train_fraction)
    }

    pub fn run(&self) -> ExperimentReport {
        let items: Vec<(usize, usize, usize)> = (0..self.datasets.len())
            .flat_map(|d| {
                (0..self.strategies.len()).flat_map(move |s| (0..self.folds).map(move |f| (d, s, f)))
            })
            .collect();
        let outcomes: Vec<(Vec<ResultRow>, Option<String>)> = items
            .par_iter()
            .map(|&(d, s, f)| self.run_item(d, s, f))
            .collect();
        let mut rows = Vec::new();
        let mut errors = Vec::new();
        for (r, e) in outcomes {
            rows.extend(r);
            errors.extend(e);
        }
        rows.sort_by(ResultRow::key_cmp);
        ExperimentReport {
            result: ExperimentResult { rows },
            errors,
        }
    }

    fn run_item(&self, d: usize, s: usize, fold: usize) -> (Vec<ResultRow>, Option<String>) {
        let ds = &self.datasets[d];
        let strategy = &self.strategies[s];
        let key = format!("{}\u{1f}{fold}", ds.name);
        let scores = self.score_item(ds, strategy, &key);
        let (values, error) = match scores {
            Ok(v) => (v, None),
            Err(e) => (
                vec![f64::NAN; self.metrics.len()],
                Some(format!("{}/{}/fold {fold}: {e}", ds.name, strategy.label)),
            ),
        };
        let rows = self
            .metrics
            .iter()
            .zip(values)
            .map(|(m, value)| ResultRow {
                dataset: ds.name.clone(),
                strategy: strategy.label.clone(),
                fold,
                metric: m.as_str().to_string(),
                value,
            })
            .collect();
        (rows, error)
    }

    fn score_item(&self, ds: &Dataset, strategy: &Strategy, key: &str) -> Result<Vec<f64>> {
        let (train, test) = stratified_split(&ds.labels, self.train_fraction, derive_seed_str(self.seed, key))?;
        let mut model = strategy.prototype.clone_unfitted();
        if !strategy.seed_fixed && model.get_params().get("seed").is_some() {
            // Integer parameters are signed, so keep the seed within 63 bits.
            let seed = derive_seed_str(self.seed, &format!("{key}\u{1f}model")) >> 1;
            model.set_params(&ParamMap::new().with("seed", seed))?;
        }
        let pick = |rows: &[usize]| -> Vec<Label> { rows.iter().map(|&i| ds.labels[i].clone()).collect() };
        model.fit(&ds.panel.slice_instances(&train)?, &pick(&train))?;
        let predicted = model.predict(&ds.panel.slice_instances(&test)?)?;
        let truth = pick(&test);
        self.metrics.iter().map(|m| m.score_labels(&truth, &predicted)).collect()
    }
}

/// Per class, a seeded shuffle puts round(fraction · n_c) instances into the
/// training set, keeping at least one on each side when the class has two or
/// more. Both index lists are returned sorted.
pub fn stratified_split(labels: &[Label], train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(l.as_str()).or_default().push(i);
    }
    let mut rng = rng_from(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (_, mut idx) in by_class {
        idx.shuffle(&mut rng);
        let n = idx.len();
        let k = if n < 2 {
            n
        } else {
            ((train_fraction * n as f64).round() as usize).clamp(1, n - 1)
        };
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    if test.is_empty() {
        return Err(Error::EmptyInput("stratified split left no test instances".into()));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dataset: String,
    pub strategy: String,
    pub fold: usize,
    pub metric: String,
    pub value: f64,
}

impl ResultRow {
    fn key_cmp(a: &ResultRow, b: &ResultRow) -> Ordering {
        (&a.dataset, &a.strategy, a.fold, &a.metric).cmp(&(&b.dataset, &b.strategy, b.fold, &b.metric))
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
}

/// Equality that treats NaN values as equal, so failure rows compare.
impl PartialEq for ExperimentResult {
    fn eq(&self, other: &Self) -> bool {
        self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| {
                ResultRow::key_cmp(a, b) == Ordering::Equal
                    && (a.value == b.value || (a.value.is_nan() && b.value.is_nan()))
            })
    }
}

pub const RESULTS_HEADER: [&str; 5] = ["dataset", "strategy", "fold", "metric", "value"];

impl ExperimentResult {
    /// CSV with 17 significant digits per value, in row order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(RESULTS_HEADER)?;
        for r in &self.rows {
            let value = if r.value.is_nan() {
                "NaN".to_string()
            } else {
                format!("{:.16e}", r.value)
            };
            w.write_record([r.dataset.as_str(), &r.strategy, &r.fold.to_string(), &r.metric, &value])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        if header.iter().ne(RESULTS_HEADER) {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                reason: format!("expected header `{}`", RESULTS_HEADER.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (i, record) in r.records().enumerate() {
            let record = record?;
            let line = i + 2;
            let field = |j: usize| record.get(j).unwrap_or("");
            let bad = |column: usize, what: &str| Error::Parse {
                line,
                column,
                reason: format!("invalid {what}"),
            };
            rows.push(ResultRow {
                dataset: field(0).to_string(),
                strategy: field(1).to_string(),
                fold: field(2).parse().map_err(|_| bad(3, "fold"))?,
                metric: field(3).to_string(),
                value: field(4).parse().map_err(|_| bad(5, "value"))?,
            });
        }
        Ok(Self { rows })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub result: ExperimentResult,
    /// One entry per failed item.
    pub errors: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::format::parse_dataset;

    fn dataset(name: &str, n_a: usize, n_b: usize) -> Dataset {
        let mut text = format!("@problemName {name}\n@univariate true\n@data\n");
        for i in 0..n_a + n_b {
            let label = if i < n_a { "a" } else { "b" };
            let level = if i < n_a { 0.0 } else { 5.0 };
            text.push_str(&format!("{},{},{}:{label}\n", level + i as f64 * 0.01, level, level + 1.0));
        }
        parse_dataset(&text).unwrap()
    }

    fn strategy(name: &str) -> Strategy {
        Strategy::from_config(&StrategyConfig {
            name: name.into(),
            params: BTreeMap::new(),
            label: None,
        })
        .unwrap()
    }

    #[test]
    fn row_count_and_order() {
        let exp = Experiment::new(
            vec![dataset("d", 10, 10)],
            vec![strategy("majority"), strategy("knn-euclid")],
            1,
            vec![Metric::Accuracy, Metric::ErrorRate],
            3,
            0.7,
        )
        .unwrap();
        let report = exp.run();
        assert!(report.errors.is_empty());
        let rows = &report.result.rows;
        assert_eq!(rows.len(), 4);
        let keys: Vec<(&str, &str)> = rows.iter().map(|r| (r.strategy.as_str(), r.metric.as_str())).collect();
        assert_eq!(
            keys,
            vec![("knn-euclid", "accuracy"), ("knn-euclid", "error"), ("majority", "accuracy"), ("majority", "error")]
        );
        assert_eq!(rows[0].value, 1.0);
    }

    #[test]
    fn majority_accuracy_equals_majority_share() {
        // 30 "a" vs 20 "b": the stratified split keeps 9 a and 6 b in test.
        let exp = Experiment::new(vec![dataset("d", 30, 20)], vec![strategy("majority")], 3, vec![Metric::Accuracy], 1, 0.7)
            .unwrap();
        for r in exp.run().result.rows {
            assert_eq!(r.value, 9.0 / 15.0);
        }
    }

    #[test]
    fn deterministic_and_identical_strategies_agree() {
        let make = || {
            let mut a = strategy("tsf");
            a.prototype.set_params(&ParamMap::new().with("n_trees", 5usize)).unwrap();
            let mut b = strategy("tsf");
            b.prototype.set_params(&ParamMap::new().with("n_trees", 5usize)).unwrap();
            b.label = "tsf_copy".into();
            Experiment::new(vec![dataset("d", 12, 12)], vec![a, b], 3, vec![Metric::Accuracy], 11, 0.5).unwrap()
        };
        let rep = make().run();
        assert!(rep.errors.is_empty(), "{:?}", rep.errors);
        let first = rep.result;
        let second = make().run().result;
        assert_eq!(first.to_csv_string().unwrap(), second.to_csv_string().unwrap());
        let (a, b): (Vec<&ResultRow>, Vec<&ResultRow>) = first.rows.iter().partition(|r| r.strategy == "tsf");
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.value, y.value);
        }
    }

    #[test]
    fn failures_become_nan_rows() {
        // Length-3 series are shorter than the minimum interval.
        let mut s = strategy("tsf");
        s.prototype.set_params(&ParamMap::new().with("min_interval", 30usize)).unwrap();
        let exp = Experiment::new(vec![dataset("d", 5, 5)], vec![s, strategy("majority")], 2, vec![Metric::Accuracy], 0, 0.7)
            .unwrap();
        let report = exp.run();
        assert_eq!(report.errors.len(), 2);
        let tsf: Vec<&ResultRow> = report.result.rows.iter().filter(|r| r.strategy == "tsf").collect();
        assert!(tsf.iter().all(|r| r.value.is_nan()));
        assert!(report.result.rows.iter().filter(|r| r.strategy == "majority").all(|r| !r.value.is_nan()));
    }

    #[test]
    fn csv_round_trip() {
        let result = ExperimentResult {
            rows: vec![
                ResultRow { dataset: "d".into(), strategy: "s".into(), fold: 0, metric: "accuracy".into(), value: 0.1 + 0.2 },
                ResultRow { dataset: "d".into(), strategy: "s".into(), fold: 1, metric: "accuracy".into(), value: f64::NAN },
                ResultRow { dataset: "d,x".into(), strategy: "s".into(), fold: 0, metric: "error".into(), value: 1e-300 },
            ],
        };
        let text = result.to_csv_string().unwrap();
        assert!(text.starts_with("dataset,strategy,fold,metric,value\n"));
        assert!(text.contains("3.0000000000000004e-1"));
        assert_eq!(ExperimentResult::read_csv(text.as_bytes()).unwrap(), result);
        assert!(ExperimentResult::read_csv("a,b\n".as_bytes()).is_err());
    }

    #[test]
    fn config_validation() {
        let cfg = ExperimentConfig::from_json(
            r#"{"datasets": [], "strategies": [{"name": "svm"}], "folds": 1, "metrics": ["accuracy"], "seed": 0}"#,
        )
        .unwrap();
        assert_eq!(cfg.train_fraction, 0.7);
        assert!(matches!(Experiment::from_config(&cfg), Err(Error::Config(_))));
        assert!(ExperimentConfig::from_json(r#"{"folds": 1}"#).is_err());
        let bad_metric = Experiment::new(vec![dataset("d", 2, 2)], vec![strategy("majority")], 1, vec![Metric::Rmse], 0, 0.7);
        assert!(matches!(bad_metric, Err(Error::Config(_))));
        let dup = Experiment::new(
            vec![dataset("d", 2, 2)],
            vec![strategy("majority"), strategy("majority")],
            1,
            vec![Metric::Accuracy],
            0,
            0.7,
        );
        assert!(matches!(dup, Err(Error::Config(_))));
    }

    #[test]
    fn stratified_split_keeps_proportions() {
        let labels: Vec<Label> = (0..50).map(|i| if i % 5 < 3 { "a" } else { "b" }.to_string()).collect();
        let (train, test) = stratified_split(&labels, 0.7, 4).unwrap();
        assert_eq!(train.len(), 35);
        assert_eq!(test.iter().filter(|&&i| labels[i] == "a").count(), 9);
        assert_eq!(stratified_split(&labels, 0.7, 4).unwrap(), (train, test));
    }
}
