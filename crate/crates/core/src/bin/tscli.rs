use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};

use tsml::benchmark::{
    rank_summary, read_dataset, ExperimentConfig, Experiment, ExperimentResult, Metric, ResultRow,
};
use tsml::classification::ts_classifier_from_name;
use tsml::data::TimeSeries;
use tsml::estimator::{ForecastingHorizon, ParamMap, ParamValue};
use tsml::forecasting::forecaster_from_name;
use tsml::Error;

#[derive(Parser)]
#[command(name = "tscli", version, about = "Time series classification, forecasting and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a classifier on a training file and score it on a test file.
    Classify {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// tsf, knn-euclid, knn-dtw, knn-ddtw, knn-wdtw or majority.
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Write a results CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Hyper-parameter as name=value; repeatable.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
    },
    /// Forecast a `time,value` CSV series and print `time,value` rows.
    Forecast {
        #[arg(long)]
        input: PathBuf,
        /// Number of steps ahead.
        #[arg(long)]
        fh: usize,
        #[arg(long, value_enum)]
        strategy: ForecastStrategy,
        #[arg(long)]
        window_length: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long, value_enum)]
        regressor: Option<RegressorName>,
    },
    /// Run a benchmark described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rank strategies from a results CSV and run post-hoc tests.
    Compare {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, value_enum)]
        test: Option<TestKind>,
        /// Metric to compare on; defaults to accuracy when present.
        #[arg(long)]
        metric: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ForecastStrategy {
    Naive,
    Ses,
    Holt,
    Poly,
    Reduced,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Recursive,
    Direct,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegressorName {
    Ols,
    Knn,
    Forest,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum TestKind {
    Friedman,
    Sign,
}

enum Failure {
    Usage(String),
    Data(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Runtime(m) => m,
        }
    }
}

/// Failures while reading inputs are data errors.
fn data(context: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Data(format!("{}: {e}", context.display()))
}

/// Failures while configuring estimators are usage errors.
fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Classify {
            train,
            test,
            strategy,
            seed,
            out,
            params,
        } => classify(&train, &test, &strategy, seed, out.as_deref(), &params),
        Command::Forecast {
            input,
            fh,
            strategy,
            window_length,
            method,
            regressor,
        } => forecast(&input, fh, strategy, window_length, method, regressor),
        Command::Bench { config } => bench(&config),
        Command::Compare { results, test, metric } => compare(&results, test, metric.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn parse_params(raw: &[String]) -> Result<ParamMap, Failure> {
    let mut params = ParamMap::new();
    for p in raw {
        let (name, value) = p
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--param `{p}` must look like name=value")))?;
        params.insert(name.trim(), ParamValue::parse(value)).map_err(usage)?;
    }
    Ok(params)
}

fn classify(
    train: &Path,
    test: &Path,
    strategy: &str,
    seed: Option<u64>,
    out: Option<&Path>,
    params: &[String],
) -> Result<(), Failure> {
    let mut model = ts_classifier_from_name(strategy).map_err(usage)?;
    let mut params = parse_params(params)?;
    if let Some(seed) = seed {
        if model.get_params().get("seed").is_none() {
            return Err(Failure::Usage(format!("strategy `{strategy}` takes no seed")));
        }
        params.insert("seed", seed).map_err(usage)?;
    }
    model.set_params(&params).map_err(usage)?;
    let train_ds = read_dataset(train).map_err(data(train))?;
    let test_ds = read_dataset(test).map_err(data(test))?;
    model.fit(&train_ds.panel, &train_ds.labels).map_err(runtime)?;
    let predicted = model.predict(&test_ds.panel).map_err(runtime)?;
    let acc = Metric::Accuracy.score_labels(&test_ds.labels, &predicted).map_err(runtime)?;
    println!("dataset: {}", test_ds.name);
    println!("strategy: {strategy}");
    println!("accuracy: {acc:.6}");
    if let Some(out) = out {
        let result = ExperimentResult {
            rows: vec![ResultRow {
                dataset: test_ds.name.clone(),
                strategy: strategy.to_string(),
                fold: 0,
                metric: Metric::Accuracy.as_str().to_string(),
                value: acc,
            }],
        };
        write_results(&result, out)?;
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum TimeFormat {
    Integer,
    Date,
}

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date")
}

fn parse_time(raw: &str) -> Option<(i64, TimeFormat)> {
    if let Ok(t) = raw.parse::<i64>() {
        return Some((t, TimeFormat::Integer));
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .map(|d| ((d - epoch()).num_days(), TimeFormat::Date))
}

fn format_time(t: i64, format: TimeFormat) -> String {
    match format {
        TimeFormat::Integer => t.to_string(),
        TimeFormat::Date => (epoch() + chrono::Duration::days(t)).format("%Y-%m-%d").to_string(),
    }
}

/// Reads `time,value` rows; a first row whose value is not numeric is taken
/// as a header.
fn read_series(path: &Path) -> Result<(TimeSeries, TimeFormat), Failure> {
    let bad = |line: usize, reason: String| Failure::Data(format!("{}: line {line}: {reason}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut format = None;
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| bad(line, e.to_string()))?;
        if record.len() != 2 {
            return Err(bad(line, format!("expected 2 fields, found {}", record.len())));
        }
        let value: f64 = match record[1].parse() {
            Ok(v) => v,
            Err(_) if line == 1 => continue,
            Err(_) => return Err(bad(line, format!("`{}` is not a number", &record[1]))),
        };
        let (t, f) = parse_time(&record[0])
            .ok_or_else(|| bad(line, format!("`{}` is neither an integer nor a YYYY-MM-DD date", &record[0])))?;
        if *format.get_or_insert(f) != f {
            return Err(bad(line, "mixes integer and date times".into()));
        }
        times.push(t);
        values.push(value);
    }
    let series = TimeSeries::from_pairs(times, values).map_err(data(path))?;
    Ok((series, format.unwrap_or(TimeFormat::Integer)))
}

fn forecast(
    input: &Path,
    fh: usize,
    strategy: ForecastStrategy,
    window_length: Option<usize>,
    method: Option<Method>,
    regressor: Option<RegressorName>,
) -> Result<(), Failure> {
    let name = match strategy {
        ForecastStrategy::Naive => "naive",
        ForecastStrategy::Ses => "ses",
        ForecastStrategy::Holt => "holt",
        ForecastStrategy::Poly => "poly",
        ForecastStrategy::Reduced => "reduced",
    };
    let mut params = ParamMap::new();
    if let Some(w) = window_length {
        params.insert("window_length", w).map_err(usage)?;
    }
    if let Some(m) = method {
        let m = match m {
            Method::Recursive => "recursive",
            Method::Direct => "direct",
        };
        params.insert("method", m).map_err(usage)?;
    }
    if let Some(r) = regressor {
        let r = match r {
            RegressorName::Ols => "ols",
            RegressorName::Knn => "knn",
            RegressorName::Forest => "forest",
        };
        params.insert("regressor", ParamValue::Estimator(r.into())).map_err(usage)?;
    }
    if !params.is_empty() && name != "reduced" {
        return Err(Failure::Usage(
            "--window-length, --method and --regressor apply to --strategy reduced only".into(),
        ));
    }
    let horizon = ForecastingHorizon::steps_ahead(fh).map_err(usage)?;
    let mut model = forecaster_from_name(name).map_err(usage)?;
    model.set_params(&params).map_err(usage)?;
    let (y, format) = read_series(input)?;
    y.step().map_err(data(input))?;
    model.fit(&y, Some(&horizon)).map_err(runtime)?;
    let pred = model.predict(&horizon).map_err(runtime)?;
    let mut stdout = io::stdout().lock();
    let mut emit = || -> io::Result<()> {
        writeln!(stdout, "time,value")?;
        for (t, v) in pred.times().iter().zip(pred.values()) {
            writeln!(stdout, "{},{v}", format_time(*t, format))?;
        }
        stdout.flush()
    };
    emit().map_err(|e| Failure::Runtime(e.to_string()))
}

fn write_results(result: &ExperimentResult, out: &Path) -> Result<(), Failure> {
    let file = File::create(out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    result.write_csv(file).map_err(runtime)
}

fn bench(config_path: &Path) -> Result<(), Failure> {
    let config = ExperimentConfig::load(config_path).map_err(usage)?;
    let experiment = Experiment::from_config(&config).map_err(|e| match e {
        Error::Config(_) => usage(e),
        other => Failure::Data(other.to_string()),
    })?;
    let report = experiment.run();
    for e in &report.errors {
        eprintln!("warning: {e}");
    }
    match &config.out {
        Some(out) => write_results(&report.result, out),
        None => report.result.write_csv(io::stdout().lock()).map_err(runtime),
    }
}

fn compare(results: &Path, test: Option<TestKind>, metric: Option<&str>) -> Result<(), Failure> {
    let file = File::open(results).map_err(|e| Failure::Data(format!("{}: {e}", results.display())))?;
    let result = ExperimentResult::read_csv(file).map_err(data(results))?;
    let metric = match metric {
        Some(m) => m.to_string(),
        None if result.rows.iter().any(|r| r.metric == "accuracy") => "accuracy".into(),
        None => result
            .rows
            .first()
            .map(|r| r.metric.clone())
            .ok_or_else(|| Failure::Data(format!("{}: no result rows", results.display())))?,
    };
    let summary = rank_summary(&result, &metric).map_err(data(results))?;
    let mut text = summary.ranks_text();
    if test != Some(TestKind::Sign) {
        text += &summary.friedman_text();
    }
    if test != Some(TestKind::Friedman) {
        text += &summary.pairs_text();
    }
    print!("{text}");
    Ok(())
}
