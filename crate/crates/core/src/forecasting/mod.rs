//! Classical forecasters and the reduction meta-forecaster.
//!
//! Every forecaster is trained on an equally spaced series. The last
//! training time point is the cutoff; relative horizons count steps of the
//! training spacing past it.

mod naive;
mod reduction;
mod smoothing;
mod trend;

pub use naive::{naive_forecast, NaiveForecaster, NaiveStrategy};
pub use reduction::{
    reduced_forecast_fit, ReducedRegressionForecaster, ReductionConfig, ReductionMethod,
};
pub use smoothing::{
    exp_smoothing_fit, exp_smoothing_insample, exp_smoothing_predict, ExponentialSmoothingForecaster,
    SmoothingState, SMOOTHING_GRID,
};
pub use trend::{poly_trend_forecast, polyfit, polyval, PolynomialTrendForecaster};

use crate::data::{TimeIndex, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, ForecastingHorizon};

pub trait Forecaster: Estimator {
    /// Fits on `y`. Strategies that need the horizon up front (direct
    /// reduction) read it from `fh`; the rest ignore it.
    fn fit(&mut self, y: &TimeSeries, fh: Option<&ForecastingHorizon>) -> Result<()>;

    /// Forecasts at the horizon's absolute time points.
    fn predict(&self, fh: &ForecastingHorizon) -> Result<TimeSeries>;

    /// Fitted values at time points taken from the training index.
    fn predict_in_sample(&self, times: &[i64]) -> Result<TimeSeries>;

    /// Last training time point, once fitted.
    fn cutoff(&self) -> Option<i64>;

    fn clone_unfitted(&self) -> Box<dyn Forecaster>;
}

/// Default-configured forecaster by registered name.
pub fn forecaster_from_name(name: &str) -> Result<Box<dyn Forecaster>> {
    Ok(match name {
        "naive" => Box::new(NaiveForecaster::new(NaiveStrategy::Last)),
        "ses" => Box::new(ExponentialSmoothingForecaster::ses(None)),
        "holt" => Box::new(ExponentialSmoothingForecaster::holt(None, None)),
        "poly" => Box::new(PolynomialTrendForecaster::new(1)),
        "reduced" => Box::new(ReducedRegressionForecaster::default()),
        other => return Err(Error::Config(format!("unknown forecaster `{other}`"))),
    })
}

/// Position and spacing of an equally spaced training series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainingFrame {
    pub start: i64,
    pub step: i64,
    pub len: usize,
}

impl TrainingFrame {
    pub fn of(y: &TimeSeries) -> Result<Self> {
        Ok(Self {
            start: y.index().first(),
            step: y.step()?,
            len: y.len(),
        })
    }

    pub fn cutoff(&self) -> i64 {
        self.start + (self.len as i64 - 1) * self.step
    }

    /// Fractional position of `t` relative to the training start.
    pub fn offset(&self, t: i64) -> f64 {
        (t - self.start) as f64 / self.step as f64
    }

    /// Training position of `t`; errors if `t` is not a training time point.
    pub fn position(&self, t: i64) -> Result<usize> {
        let delta = t - self.start;
        if delta < 0 || delta % self.step != 0 || delta / self.step >= self.len as i64 {
            return Err(Error::NotInTrainingIndex(t));
        }
        Ok((delta / self.step) as usize)
    }

    /// Relative steps and absolute time points of a horizon.
    pub fn resolve(&self, fh: &ForecastingHorizon) -> Result<(Vec<i64>, Vec<i64>)> {
        let cutoff = self.cutoff();
        let absolute = fh.to_absolute(cutoff, self.step)?;
        let relative = fh.to_relative(cutoff, self.step)?;
        Ok((relative, absolute))
    }

    pub fn positions(&self, times: &[i64]) -> Result<Vec<usize>> {
        times.iter().map(|&t| self.position(t)).collect()
    }
}

pub(crate) fn series_at(times: Vec<i64>, values: Vec<f64>) -> Result<TimeSeries> {
    TimeSeries::new(TimeIndex::new(times)?, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_positions() {
        let y = TimeSeries::from_pairs(vec![10, 12, 14], vec![1., 2., 3.]).unwrap();
        let frame = TrainingFrame::of(&y).unwrap();
        assert_eq!(frame.cutoff(), 14);
        assert_eq!(frame.position(12).unwrap(), 1);
        assert_eq!(frame.position(13), Err(Error::NotInTrainingIndex(13)));
        assert_eq!(frame.position(16), Err(Error::NotInTrainingIndex(16)));
        assert_eq!(frame.offset(18), 4.0);
        let fh = ForecastingHorizon::relative(vec![1, 3]).unwrap();
        assert_eq!(frame.resolve(&fh).unwrap(), (vec![1, 3], vec![16, 20]));
    }

    #[test]
    fn irregular_training_series_rejected() {
        let y = TimeSeries::from_pairs(vec![0, 1, 3], vec![1., 2., 3.]).unwrap();
        assert_eq!(TrainingFrame::of(&y), Err(Error::UnequalSpacing));
    }
}
