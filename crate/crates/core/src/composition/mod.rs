//! Meta-estimators: pipelines, column ensembles and concatenation, temporal
//! splitting and grid search for forecasters.

mod ensemble;
mod forecasting_pipeline;
mod grid_search;
mod pipeline;
mod split;

pub use ensemble::{column_concatenate, ColumnConcatenator, ColumnEnsembleClassifier};
pub use forecasting_pipeline::ForecastingPipeline;
pub use grid_search::{grid_search_forecaster, CvRow, Grid, GridSearchResult};
pub use pipeline::{FinalEstimator, Pipeline, Predictions, Targets};
pub use split::{temporal_split, Fold, SplitMethod, SplitSpec};
