use super::{series_at, Forecaster, TrainingFrame};
use crate::data::TimeSeries;
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, ForecastingHorizon, ParamMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaiveStrategy {
    /// Repeat the last observation.
    Last,
    /// Repeat the sample mean.
    Mean,
    /// Repeat the last full season of length `sp`.
    SeasonalLast(usize),
}

impl NaiveStrategy {
    fn min_length(&self) -> usize {
        match self {
            NaiveStrategy::SeasonalLast(sp) => (*sp).max(1),
            _ => 1,
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Value forecast `step` steps past the end of `values`.
fn forecast_value(values: &[f64], strategy: NaiveStrategy, step: i64) -> f64 {
    let t = values.len();
    match strategy {
        NaiveStrategy::Last => values[t - 1],
        NaiveStrategy::Mean => mean(values),
        NaiveStrategy::SeasonalLast(sp) => {
            let offset = ((step - 1).rem_euclid(sp as i64)) as usize;
            values[t - sp + offset]
        }
    }
}

fn check_length(y: &TimeSeries, strategy: NaiveStrategy) -> Result<()> {
    if let NaiveStrategy::SeasonalLast(0) = strategy {
        return Err(Error::InvalidParameter {
            name: "sp".into(),
            reason: "season length must be >= 1".into(),
        });
    }
    let needed = strategy.min_length();
    if y.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            actual: y.len(),
        });
    }
    Ok(())
}

pub fn naive_forecast(
    y: &TimeSeries,
    fh: &ForecastingHorizon,
    strategy: NaiveStrategy,
) -> Result<TimeSeries> {
    check_length(y, strategy)?;
    let frame = TrainingFrame::of(y)?;
    let (relative, absolute) = frame.resolve(fh)?;
    let values = relative
        .iter()
        .map(|&s| forecast_value(y.values(), strategy, s))
        .collect();
    series_at(absolute, values)
}

#[derive(Debug, Clone)]
pub struct NaiveForecaster {
    strategy: NaiveStrategy,
    fitted: Option<(TimeSeries, TrainingFrame)>,
}

impl NaiveForecaster {
    pub fn new(strategy: NaiveStrategy) -> Self {
        Self {
            strategy,
            fitted: None,
        }
    }
}

impl Estimator for NaiveForecaster {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Forecaster
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn get_params(&self) -> ParamMap {
        let (name, sp) = match self.strategy {
            NaiveStrategy::Last => ("last", 1),
            NaiveStrategy::Mean => ("mean", 1),
            NaiveStrategy::SeasonalLast(sp) => ("seasonal_last", sp),
        };
        ParamMap::new().with("sp", sp).with("strategy", name)
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let mut sp = match self.strategy {
            NaiveStrategy::SeasonalLast(sp) => sp,
            _ => 1,
        };
        let mut kind = match self.strategy {
            NaiveStrategy::Last => "last",
            NaiveStrategy::Mean => "mean",
            NaiveStrategy::SeasonalLast(_) => "seasonal_last",
        }
        .to_string();
        for (name, value) in updates.iter() {
            match name {
                "sp" => sp = value.as_usize(name)?,
                "strategy" => kind = value.as_str(name)?.to_string(),
                other => return Err(Error::UnknownParameter(other.to_string())),
            }
        }
        let strategy = match kind.as_str() {
            "last" => NaiveStrategy::Last,
            "mean" => NaiveStrategy::Mean,
            "seasonal_last" if sp >= 1 => NaiveStrategy::SeasonalLast(sp),
            other => {
                return Err(Error::InvalidParameter {
                    name: "strategy".into(),
                    reason: format!("`{other}` with sp={sp}"),
                })
            }
        };
        *self = Self::new(strategy);
        Ok(())
    }
}

impl Forecaster for NaiveForecaster {
    fn fit(&mut self, y: &TimeSeries, _fh: Option<&ForecastingHorizon>) -> Result<()> {
        check_length(y, self.strategy)?;
        let frame = TrainingFrame::of(y)?;
        self.fitted = Some((y.clone(), frame));
        Ok(())
    }

    fn predict(&self, fh: &ForecastingHorizon) -> Result<TimeSeries> {
        let (y, _) = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        naive_forecast(y, fh, self.strategy)
    }

    /// One-step-ahead fitted values; the first point (or first season) is
    /// fitted by itself, the mean strategy uses the full-sample mean.
    fn predict_in_sample(&self, times: &[i64]) -> Result<TimeSeries> {
        let (y, frame) = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        let v = y.values();
        let values = frame
            .positions(times)?
            .into_iter()
            .map(|p| match self.strategy {
                NaiveStrategy::Last => v[p.saturating_sub(1)],
                NaiveStrategy::Mean => mean(v),
                NaiveStrategy::SeasonalLast(sp) => {
                    if p >= sp {
                        v[p - sp]
                    } else {
                        v[p]
                    }
                }
            })
            .collect();
        series_at(times.to_vec(), values)
    }

    fn cutoff(&self) -> Option<i64> {
        self.fitted.as_ref().map(|f| f.1.cutoff())
    }

    fn clone_unfitted(&self) -> Box<dyn Forecaster> {
        Box::new(Self::new(self.strategy))
    }
}
