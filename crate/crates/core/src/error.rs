//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // containers
    #[error("time index must be non-empty and strictly increasing: {0}")]
    InvalidTimeIndex(String),
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("columns have unequal lengths: {0}")]
    RaggedColumns(String),
    #[error("column `{0}` mixes cell kinds")]
    MixedCellKinds(String),
    #[error("duplicate column name `{0}`")]
    DuplicateColumnName(String),
    #[error("no such column `{0}`")]
    NoSuchColumn(String),
    #[error("column `{0}` does not hold series cells")]
    NotASeriesColumn(String),
    #[error("column `{0}` holds primitives; only series columns can be unrolled")]
    PrimitiveColumnPresent(String),
    #[error("duplicate record (instance {instance}, variable `{variable}`, time {time})")]
    DuplicateTriple {
        instance: u64,
        variable: String,
        time: i64,
    },
    #[error("instance {instance} has no records for variable `{variable}`")]
    MissingVariableForInstance { instance: u64, variable: String },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    // estimator contract
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("parameter `{name}` expects {expected}")]
    TypeMismatch { name: String, expected: &'static str },
    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("estimator is not fitted")]
    NotFitted,
    #[error("invalid forecasting horizon: {0}")]
    InvalidHorizon(String),
    #[error("horizon point {point} is not after cutoff {cutoff}")]
    HorizonNotInFuture { point: i64, cutoff: i64 },
    #[error("time point {0} is not part of the training index")]
    NotInTrainingIndex(i64),

    // transformers / forecasters
    #[error("window length {window} needs a series longer than {len}")]
    WindowTooLong { window: usize, len: usize },
    #[error("series is not equally spaced")]
    UnequalSpacing,
    #[error("{bins} bins requested for a series of length {len}")]
    TooManyBins { bins: usize, len: usize },
    #[error("series too short: need at least {needed}, got {actual}")]
    SeriesTooShort { needed: usize, actual: usize },
    #[error("interval [{start}, {end}) out of bounds for length {len}")]
    IntervalOutOfBounds { start: usize, end: usize, len: usize },
    #[error("rank-deficient design matrix")]
    DegenerateFit,
    #[error("direct reduction needs the forecasting horizon at fit time")]
    DirectNeedsHorizon,
    #[error("horizon step {0} was not seen at fit time")]
    HorizonMismatch(i64),

    // learners
    #[error("too few rows: need at least {needed}, got {actual}")]
    TooFewRows { needed: usize, actual: usize },
    #[error("k = {k} is invalid for {n} training instances")]
    InvalidK { k: usize, n: usize },
    #[error("band window {window} admits no warping path between lengths {m} and {n}")]
    BandTooNarrow { window: usize, m: usize, n: usize },
    #[error("empty series")]
    EmptySeries,

    // composition
    #[error("incompatible pipeline step `{step}`: {reason}")]
    IncompatibleStep { step: String, reason: String },
    #[error("column `{0}` has no assigned estimator")]
    UnassignedColumn(String),

    // benchmarking
    #[error("parse error at line {line}, column {column}: {reason}")]
    Parse {
        line: usize,
        column: usize,
        reason: String,
    },
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("incomplete pivot: {0}")]
    IncompletePivot(String),
    #[error("all paired comparisons are ties")]
    AllTies,
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}
