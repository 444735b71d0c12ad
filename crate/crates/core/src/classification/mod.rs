//! Time series classifiers and regressors over single-column panels of
//! equal-length series.

mod dummy;
mod knn;
mod tsf;

pub use dummy::MajorityClassifier;
pub use knn::{knn_ts_classify, KnnTimeSeriesClassifier, KnnTimeSeriesRegressor};
pub use tsf::{tsf_fit, tsf_predict, TimeSeriesForest, TsfModel, TsfParams};

use crate::data::{Panel, TimeSeries};
use crate::distances::DistanceSpec;
use crate::error::{Error, Result};
use crate::estimator::{Estimator, Label};

pub trait TimeSeriesClassifier: Estimator {
    fn fit(&mut self, x: &Panel, y: &[Label]) -> Result<()>;

    fn predict(&self, x: &Panel) -> Result<Vec<Label>>;

    fn clone_unfitted(&self) -> Box<dyn TimeSeriesClassifier>;
}

pub trait TimeSeriesRegressor: Estimator {
    fn fit(&mut self, x: &Panel, y: &[f64]) -> Result<()>;

    fn predict(&self, x: &Panel) -> Result<Vec<f64>>;

    fn clone_unfitted(&self) -> Box<dyn TimeSeriesRegressor>;
}

/// Default-configured time series classifier by registered name.
pub fn ts_classifier_from_name(name: &str) -> Result<Box<dyn TimeSeriesClassifier>> {
    Ok(match name {
        "tsf" => Box::new(TimeSeriesForest::default()),
        "knn-euclid" => Box::new(KnnTimeSeriesClassifier::new(1, DistanceSpec::euclidean())),
        "knn-dtw" => Box::new(KnnTimeSeriesClassifier::new(1, DistanceSpec::dtw(None)?)),
        "knn-ddtw" => Box::new(KnnTimeSeriesClassifier::new(1, DistanceSpec::ddtw(None)?)),
        "knn-wdtw" => Box::new(KnnTimeSeriesClassifier::new(
            1,
            DistanceSpec::wdtw(crate::distances::DEFAULT_WDTW_G)?,
        )),
        "majority" => Box::new(MajorityClassifier::new()),
        other => return Err(Error::Config(format!("unknown classifier `{other}`"))),
    })
}

/// The series of the panel's only series column, checked for equal length.
/// Returns the series and their common length.
pub(crate) fn single_column_series(panel: &Panel) -> Result<(Vec<&TimeSeries>, usize)> {
    let names = panel.series_column_names();
    let name = match names.as_slice() {
        [only] => *only,
        [] => return Err(Error::EmptyInput("panel has no series column".into())),
        _ => {
            return Err(Error::IncompatibleStep {
                step: String::new(),
                reason: format!("expected one series column, found {}", names.len()),
            })
        }
    };
    let series = panel.series_column(name)?;
    let len = series[0].len();
    if let Some(bad) = series.iter().find(|s| s.len() != len) {
        return Err(Error::LengthMismatch {
            expected: len,
            actual: bad.len(),
        });
    }
    Ok((series, len))
}

pub(crate) fn check_n_targets(panel: &Panel, n: usize) -> Result<()> {
    if panel.n_instances() != n {
        return Err(Error::LengthMismatch {
            expected: panel.n_instances(),
            actual: n,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Cell;

    #[test]
    fn single_column_checks() {
        let s = |n: usize| TimeSeries::from_values(vec![0.0; n]).unwrap();
        let ok = Panel::from_series("a", vec![s(3), s(3)]).unwrap();
        assert_eq!(single_column_series(&ok).unwrap().1, 3);
        let ragged = Panel::from_series("a", vec![s(3), s(4)]).unwrap();
        assert_eq!(
            single_column_series(&ragged).unwrap_err(),
            Error::LengthMismatch { expected: 3, actual: 4 }
        );
        let two = Panel::new(vec![
            ("a".into(), vec![Cell::Series(s(2))]),
            ("b".into(), vec![Cell::Series(s(2))]),
        ])
        .unwrap();
        assert!(single_column_series(&two).is_err());
    }

    #[test]
    fn factory_names() {
        for name in ["tsf", "knn-euclid", "knn-dtw", "knn-ddtw", "knn-wdtw", "majority"] {
            assert!(!ts_classifier_from_name(name).unwrap().is_fitted());
        }
        assert!(ts_classifier_from_name("svm").is_err());
    }
}
