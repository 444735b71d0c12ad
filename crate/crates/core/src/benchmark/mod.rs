//! Benchmarking: dataset files, metrics, experiment orchestration and
//! post-hoc statistics.

mod experiment;
mod format;
mod metrics;
mod stats;

pub use experiment::{
    stratified_split, Experiment, ExperimentConfig, ExperimentReport, ExperimentResult, ResultRow,
    Strategy, StrategyConfig, RESULTS_HEADER,
};
pub use format::{parse_dataset, read_dataset, serialize_dataset, Dataset};
pub use metrics::{accuracy, mase, rmse, smape, Metric};
pub use stats::{
    average_ranks, friedman_test, rank_summary, sign_test, FriedmanResult, PairComparison, Pivot,
    RankSummary, SignTest,
};
