//! Forecasting by reduction to tabular regression over sliding windows.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::{series_at, Forecaster, TrainingFrame};
use crate::data::TimeSeries;
use crate::error::{Error, Result};
use crate::estimator::{
    prefix_error, Estimator, EstimatorKind, ForecastingHorizon, ParamMap, ParamValue,
};
use crate::tabular::{regressor_from_name, LinearRegression, Matrix, Regressor};
use crate::transformers::{tabularize_offset, tabularize_sliding};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionMethod {
    /// One one-step model, fed its own predictions.
    Recursive,
    /// One model per horizon step.
    Direct,
}

impl ReductionMethod {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "recursive" => Ok(ReductionMethod::Recursive),
            "direct" => Ok(ReductionMethod::Direct),
            other => Err(Error::InvalidParameter {
                name: "method".into(),
                reason: format!("unknown method `{other}`"),
            }),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ReductionMethod::Recursive => "recursive",
            ReductionMethod::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionConfig {
    pub window_length: usize,
    pub method: ReductionMethod,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self {
            window_length: 10,
            method: ReductionMethod::Recursive,
        }
    }
}

enum Models {
    Recursive(Box<dyn Regressor>),
    /// Keyed by relative step.
    Direct(BTreeMap<i64, Box<dyn Regressor>>),
}

struct Fitted {
    frame: TrainingFrame,
    values: Vec<f64>,
    models: Models,
}

/// Meta-forecaster wrapping any tabular regressor.
pub struct ReducedRegressionForecaster {
    regressor: Box<dyn Regressor>,
    config: ReductionConfig,
    fitted: Option<Fitted>,
}

impl fmt::Debug for ReducedRegressionForecaster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReducedRegressionForecaster")
            .field("regressor", &self.regressor.name())
            .field("config", &self.config)
            .field("fitted", &self.fitted.is_some())
            .finish()
    }
}

impl Default for ReducedRegressionForecaster {
    fn default() -> Self {
        Self::new(Box::new(LinearRegression::new()), ReductionConfig::default())
    }
}

/// Fits a reduced forecaster on `y`; `fh` is required for the direct method.
pub fn reduced_forecast_fit(
    y: &TimeSeries,
    regressor: &dyn Regressor,
    config: ReductionConfig,
    fh: Option<&ForecastingHorizon>,
) -> Result<ReducedRegressionForecaster> {
    let mut f = ReducedRegressionForecaster::new(regressor.clone_unfitted(), config);
    f.fit(y, fh)?;
    Ok(f)
}

fn one_row(window: &[f64]) -> Result<Matrix> {
    Matrix::new(1, window.len(), window.to_vec())
}

impl ReducedRegressionForecaster {
    pub fn new(regressor: Box<dyn Regressor>, config: ReductionConfig) -> Self {
        Self {
            regressor: regressor.clone_unfitted(),
            config,
            fitted: None,
        }
    }

    pub fn config(&self) -> ReductionConfig {
        self.config
    }

    /// Steps the direct models were trained for.
    pub fn fitted_steps(&self) -> Option<Vec<i64>> {
        match &self.fitted.as_ref()?.models {
            Models::Direct(m) => Some(m.keys().copied().collect()),
            Models::Recursive(_) => None,
        }
    }

    fn fitted(&self) -> Result<&Fitted> {
        self.fitted.as_ref().ok_or(Error::NotFitted)
    }
}

impl Estimator for ReducedRegressionForecaster {
    fn name(&self) -> &'static str {
        "reduced"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Forecaster
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn get_params(&self) -> ParamMap {
        let mut p = ParamMap::new()
            .with("method", self.config.method.as_str())
            .with("regressor", ParamValue::Estimator(self.regressor.name().into()))
            .with("window_length", self.config.window_length);
        p.extend_prefixed("regressor", self.regressor.get_params());
        p
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let (own, nested) = updates.split_nested();
        let mut config = self.config;
        let mut regressor = self.regressor.clone_unfitted();
        for (name, value) in own {
            match name {
                "method" => config.method = ReductionMethod::parse(value.as_str(name)?)?,
                "window_length" => {
                    config.window_length = value.as_usize(name)?;
                    if config.window_length == 0 {
                        return Err(Error::InvalidParameter {
                            name: name.into(),
                            reason: "must be >= 1".into(),
                        });
                    }
                }
                "regressor" => regressor = regressor_from_name(value.as_str(name)?)?,
                other => return Err(Error::UnknownParameter(other.to_string())),
            }
        }
        for (component, params) in nested {
            if component != "regressor" {
                let first = params.iter().next().map_or(String::new(), |(k, _)| k.to_string());
                return Err(Error::UnknownParameter(format!("{component}__{first}")));
            }
            regressor
                .set_params(&params)
                .map_err(|e| prefix_error("regressor", e))?;
        }
        *self = Self {
            regressor,
            config,
            fitted: None,
        };
        Ok(())
    }
}

impl Forecaster for ReducedRegressionForecaster {
    fn fit(&mut self, y: &TimeSeries, fh: Option<&ForecastingHorizon>) -> Result<()> {
        let frame = TrainingFrame::of(y)?;
        let w = self.config.window_length;
        let models = match self.config.method {
            ReductionMethod::Recursive => {
                let set = tabularize_sliding(y, w)?;
                let mut model = self.regressor.clone_unfitted();
                model.fit(&set.x, &set.y)?;
                Models::Recursive(model)
            }
            ReductionMethod::Direct => {
                let fh = fh.ok_or(Error::DirectNeedsHorizon)?;
                let (steps, _) = frame.resolve(fh)?;
                let fitted = steps
                    .par_iter()
                    .map(|&h| {
                        let set = tabularize_offset(y, w, h as usize)?;
                        let mut model = self.regressor.clone_unfitted();
                        model.fit(&set.x, &set.y)?;
                        Ok((h, model))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Models::Direct(fitted.into_iter().collect())
            }
        };
        self.fitted = Some(Fitted {
            frame,
            values: y.values().to_vec(),
            models,
        });
        Ok(())
    }

    fn predict(&self, fh: &ForecastingHorizon) -> Result<TimeSeries> {
        let fitted = self.fitted()?;
        let w = self.config.window_length;
        let (steps, absolute) = fitted.frame.resolve(fh)?;
        let last = &fitted.values[fitted.values.len() - w..];
        let values = match &fitted.models {
            Models::Recursive(model) => {
                let max = *steps.iter().max().expect("horizon is non-empty") as usize;
                let mut path = last.to_vec();
                for _ in 0..max {
                    let next = model.predict(&one_row(&path[path.len() - w..])?)?[0];
                    path.push(next);
                }
                steps.iter().map(|&h| path[w + h as usize - 1]).collect()
            }
            Models::Direct(models) => {
                let row = one_row(last)?;
                steps
                    .iter()
                    .map(|h| {
                        let model = models.get(h).ok_or(Error::HorizonMismatch(*h))?;
                        Ok(model.predict(&row)?[0])
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        series_at(absolute, values)
    }

    /// Fitted values from the observed window before each point. Positions
    /// earlier than the window length (plus the smallest direct step, less
    /// one) have no full window and are rejected.
    fn predict_in_sample(&self, times: &[i64]) -> Result<TimeSeries> {
        let fitted = self.fitted()?;
        let w = self.config.window_length;
        let (model, h) = match &fitted.models {
            Models::Recursive(m) => (m, 1usize),
            Models::Direct(models) => {
                let (h, m) = models.iter().next().expect("at least one step");
                (m, *h as usize)
            }
        };
        let first = w + h - 1;
        let mut rows = Vec::with_capacity(times.len());
        for (&t, p) in times.iter().zip(fitted.frame.positions(times)?) {
            if p < first {
                return Err(Error::InvalidHorizon(format!(
                    "no full window before time point {t}"
                )));
            }
            rows.push(fitted.values[p + 1 - h - w..p + 1 - h].to_vec());
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput("no time points".into()));
        }
        let values = model.predict(&Matrix::from_rows(&rows)?)?;
        series_at(times.to_vec(), values)
    }

    fn cutoff(&self) -> Option<i64> {
        self.fitted.as_ref().map(|f| f.frame.cutoff())
    }

    fn clone_unfitted(&self) -> Box<dyn Forecaster> {
        Box::new(Self::new(self.regressor.clone_unfitted(), self.config))
    }
}
