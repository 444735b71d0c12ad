use std::fmt;

use crate::data::TimeSeries;
use crate::error::{Error, Result};
use crate::estimator::{prefix_error, Estimator, EstimatorKind, ForecastingHorizon, ParamMap};
use crate::forecasting::Forecaster;
use crate::transformers::{detrend_inverse, detrend_transform, detrender_fit, Detrender, DetrenderState};

/// Detrenders applied to the target in order, then a forecaster on the
/// residual. Forecasts have the trends added back in reverse order.
///
/// Parameters are exposed as `step__param` and `forecaster__param`.
pub struct ForecastingPipeline {
    steps: Vec<(String, Detrender)>,
    forecaster: Box<dyn Forecaster>,
    states: Option<Vec<DetrenderState>>,
}

impl fmt::Debug for ForecastingPipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let steps: Vec<&str> = self.steps.iter().map(|(n, _)| n.as_str()).collect();
        f.debug_struct("ForecastingPipeline")
            .field("steps", &steps)
            .field("forecaster", &self.forecaster.name())
            .field("fitted", &self.states.is_some())
            .finish()
    }
}

const FORECASTER: &str = "forecaster";

impl ForecastingPipeline {
    pub fn new(steps: Vec<(String, Detrender)>, forecaster: Box<dyn Forecaster>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (name, _) in &steps {
            if name.is_empty() || name.contains("__") || name == FORECASTER || !seen.insert(name.as_str()) {
                return Err(Error::InvalidParameter {
                    name: name.clone(),
                    reason: "step names must be unique, non-empty, free of `__` and not `forecaster`".into(),
                });
            }
        }
        Ok(Self {
            steps,
            forecaster: forecaster.clone_unfitted(),
            states: None,
        })
    }

    fn unfitted_copy(&self) -> Self {
        Self {
            steps: self
                .steps
                .iter()
                .map(|(n, d)| (n.clone(), d.clone()))
                .collect(),
            forecaster: self.forecaster.clone_unfitted(),
            states: None,
        }
    }

    fn restore(&self, residual: TimeSeries) -> Result<TimeSeries> {
        let states = self.states.as_ref().ok_or(Error::NotFitted)?;
        states.iter().rev().try_fold(residual, |r, s| detrend_inverse(s, &r))
    }
}

impl Estimator for ForecastingPipeline {
    fn name(&self) -> &'static str {
        "forecasting_pipeline"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Forecaster
    }

    fn is_fitted(&self) -> bool {
        self.states.is_some()
    }

    fn get_params(&self) -> ParamMap {
        let mut p = ParamMap::new();
        for (name, d) in &self.steps {
            p.extend_prefixed(name, d.get_params());
        }
        p.extend_prefixed(FORECASTER, self.forecaster.get_params());
        p
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let (own, nested) = updates.split_nested();
        if let Some((name, _)) = own.first() {
            return Err(Error::UnknownParameter(name.to_string()));
        }
        let mut next = self.unfitted_copy();
        for (component, params) in nested {
            if component == FORECASTER {
                next.forecaster.set_params(&params).map_err(|e| prefix_error(FORECASTER, e))?;
            } else if let Some((_, d)) = next.steps.iter_mut().find(|(n, _)| *n == component) {
                d.set_params(&params).map_err(|e| prefix_error(&component, e))?;
            } else {
                let first = params.iter().next().map_or(String::new(), |(k, _)| k.to_string());
                return Err(Error::UnknownParameter(format!("{component}__{first}")));
            }
        }
        *self = next;
        Ok(())
    }
}

impl Forecaster for ForecastingPipeline {
    fn fit(&mut self, y: &TimeSeries, fh: Option<&ForecastingHorizon>) -> Result<()> {
        self.states = None;
        let mut current = y.clone();
        let mut states = Vec::with_capacity(self.steps.len());
        for (_, d) in &self.steps {
            let state = detrender_fit(&current, d.spec())?;
            current = detrend_transform(&state, &current)?;
            states.push(state);
        }
        self.forecaster.fit(&current, fh)?;
        self.states = Some(states);
        Ok(())
    }

    fn predict(&self, fh: &ForecastingHorizon) -> Result<TimeSeries> {
        if self.states.is_none() {
            return Err(Error::NotFitted);
        }
        self.restore(self.forecaster.predict(fh)?)
    }

    fn predict_in_sample(&self, times: &[i64]) -> Result<TimeSeries> {
        if self.states.is_none() {
            return Err(Error::NotFitted);
        }
        self.restore(self.forecaster.predict_in_sample(times)?)
    }

    fn cutoff(&self) -> Option<i64> {
        self.states.as_ref().and(self.forecaster.cutoff())
    }

    fn clone_unfitted(&self) -> Box<dyn Forecaster> {
        Box::new(self.unfitted_copy())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecasting::{NaiveForecaster, NaiveStrategy, PolynomialTrendForecaster};

    fn fh(h: usize) -> ForecastingHorizon {
        ForecastingHorizon::steps_ahead(h).unwrap()
    }

    #[test]
    fn linear_detrend_then_mean_extrapolates_trend() {
        // y = 1 + 2t + alternating ±1 around the line; the residual mean is 0
        // so forecasts follow the fitted line.
        let values: Vec<f64> = (0..10).map(|t| 1.0 + 2.0 * t as f64 + if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let y = TimeSeries::from_values(values).unwrap();
        let mut p = ForecastingPipeline::new(
            vec![("detrend".into(), Detrender::polynomial(1))],
            Box::new(NaiveForecaster::new(NaiveStrategy::Mean)),
        )
        .unwrap();
        p.fit(&y, None).unwrap();
        let pred = p.predict(&fh(2)).unwrap();
        let mut direct = PolynomialTrendForecaster::new(1);
        direct.fit(&y, None).unwrap();
        let line = direct.predict(&fh(2)).unwrap();
        assert_eq!(pred.times(), &[10, 11]);
        for (a, b) in pred.values().iter().zip(line.values()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert_eq!(p.cutoff(), Some(9));
    }

    #[test]
    fn no_steps_is_the_forecaster() {
        let y = TimeSeries::from_values(vec![1., 5., 2., 8.]).unwrap();
        let mut p = ForecastingPipeline::new(vec![], Box::new(NaiveForecaster::new(NaiveStrategy::Last))).unwrap();
        p.fit(&y, None).unwrap();
        assert_eq!(p.predict(&fh(3)).unwrap().values(), &[8., 8., 8.]);
        assert_eq!(p.predict_in_sample(&[1, 2]).unwrap().values(), &[1., 5.]);
    }

    #[test]
    fn params_and_errors() {
        let mut p = ForecastingPipeline::new(
            vec![("detrend".into(), Detrender::polynomial(1))],
            Box::new(NaiveForecaster::new(NaiveStrategy::Last)),
        )
        .unwrap();
        assert_eq!(p.predict(&fh(1)), Err(Error::NotFitted));
        p.set_params(&ParamMap::new().with("detrend__degree", 2usize).with("forecaster__strategy", "mean"))
            .unwrap();
        let params = p.get_params();
        assert_eq!(params.get("detrend__degree").unwrap().as_usize("d").unwrap(), 2);
        assert_eq!(params.get("forecaster__strategy").unwrap().as_str("s").unwrap(), "mean");
        assert!(p.set_params(&ParamMap::new().with("other__x", 1usize)).is_err());
        assert!(ForecastingPipeline::new(
            vec![("forecaster".into(), Detrender::polynomial(0))],
            Box::new(NaiveForecaster::new(NaiveStrategy::Last))
        )
        .is_err());
    }
}
