//! Unified fit/predict toolkit for machine learning with time series.

pub mod benchmark;
pub mod classification;
pub mod composition;
pub mod data;
pub mod distances;
pub mod error;
pub mod estimator;
pub mod forecasting;
pub mod random;
pub mod tabular;
pub mod transformers;

pub use error::{Error, Result};
