//! Detrending: subtract a fitted trend, add it back on inversion.

use std::fmt;

use super::{map_series_cells, Data, DataKind, Transformer};
use crate::data::{TimeIndex, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::{
    prefix_error, Estimator, EstimatorKind, ForecastingHorizon, ParamMap, ParamValue,
};
use crate::forecasting::{forecaster_from_name, polyfit, polyval, Forecaster, TrainingFrame};

/// How the trend is modelled.
pub enum TrendSpec {
    Polynomial(usize),
    /// Unfitted prototype; each fit works on a fresh clone.
    Forecaster(Box<dyn Forecaster>),
}

impl TrendSpec {
    fn duplicate(&self) -> TrendSpec {
        match self {
            TrendSpec::Polynomial(d) => TrendSpec::Polynomial(*d),
            TrendSpec::Forecaster(f) => TrendSpec::Forecaster(f.clone_unfitted()),
        }
    }
}

impl fmt::Debug for TrendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrendSpec::Polynomial(d) => write!(f, "Polynomial({d})"),
            TrendSpec::Forecaster(fc) => write!(f, "Forecaster({})", fc.name()),
        }
    }
}

pub enum FittedTrend {
    /// Ascending coefficients in training positions; time `t` maps to
    /// position `(t − start) / step`.
    Polynomial { coefs: Vec<f64>, start: i64, step: i64 },
    Forecaster(Box<dyn Forecaster>),
}

impl fmt::Debug for FittedTrend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FittedTrend::Polynomial { coefs, start, step } => f
                .debug_struct("Polynomial")
                .field("coefs", coefs)
                .field("start", start)
                .field("step", step)
                .finish(),
            FittedTrend::Forecaster(fc) => write!(f, "Forecaster({})", fc.name()),
        }
    }
}

#[derive(Debug)]
pub struct DetrenderState {
    pub trend: FittedTrend,
    pub training_index: TimeIndex,
}

impl DetrenderState {
    /// Trend evaluated at ascending time points. Forecaster trends use
    /// in-sample predictions up to the cutoff and forecasts after it.
    pub fn trend_at(&self, times: &[i64]) -> Result<Vec<f64>> {
        match &self.trend {
            FittedTrend::Polynomial { coefs, start, step } => Ok(times
                .iter()
                .map(|&t| polyval(coefs, (t - start) as f64 / *step as f64))
                .collect()),
            FittedTrend::Forecaster(f) => {
                let cutoff = f.cutoff().ok_or(Error::NotFitted)?;
                let (past, future): (Vec<i64>, Vec<i64>) = times.iter().partition(|&&t| t <= cutoff);
                let mut values = Vec::with_capacity(times.len());
                if !past.is_empty() {
                    values.extend_from_slice(f.predict_in_sample(&past)?.values());
                }
                if !future.is_empty() {
                    let fh = ForecastingHorizon::absolute(future)?;
                    values.extend_from_slice(f.predict(&fh)?.values());
                }
                Ok(values)
            }
        }
    }
}

pub fn detrender_fit(y: &TimeSeries, trend: &TrendSpec) -> Result<DetrenderState> {
    let fitted = match trend {
        TrendSpec::Polynomial(degree) => {
            let frame = TrainingFrame::of(y)?;
            FittedTrend::Polynomial {
                coefs: polyfit(y.values(), *degree)?,
                start: frame.start,
                step: frame.step,
            }
        }
        TrendSpec::Forecaster(proto) => {
            let mut f = proto.clone_unfitted();
            f.fit(y, None)?;
            FittedTrend::Forecaster(f)
        }
    };
    Ok(DetrenderState {
        trend: fitted,
        training_index: y.index().clone(),
    })
}

pub fn detrend_transform(state: &DetrenderState, y: &TimeSeries) -> Result<TimeSeries> {
    let trend = state.trend_at(y.times())?;
    let values = y.values().iter().zip(&trend).map(|(v, t)| v - t).collect();
    TimeSeries::new(y.index().clone(), values)
}

pub fn detrend_inverse(state: &DetrenderState, r: &TimeSeries) -> Result<TimeSeries> {
    let trend = state.trend_at(r.times())?;
    let values = r.values().iter().zip(&trend).map(|(v, t)| v + t).collect();
    TimeSeries::new(r.index().clone(), values)
}

/// Panel detrender. Each instance's series is detrended against a trend
/// fitted on that series alone.
#[derive(Debug)]
pub struct Detrender {
    spec: TrendSpec,
    fitted: bool,
}

impl Detrender {
    pub fn polynomial(degree: usize) -> Self {
        Self::new(TrendSpec::Polynomial(degree))
    }

    pub fn with_forecaster(forecaster: Box<dyn Forecaster>) -> Self {
        Self::new(TrendSpec::Forecaster(forecaster.clone_unfitted()))
    }

    pub fn new(spec: TrendSpec) -> Self {
        Self {
            spec,
            fitted: false,
        }
    }

    pub fn spec(&self) -> &TrendSpec {
        &self.spec
    }
}

impl Clone for Detrender {
    fn clone(&self) -> Self {
        Self {
            spec: self.spec.duplicate(),
            fitted: self.fitted,
        }
    }
}

impl Estimator for Detrender {
    fn name(&self) -> &'static str {
        "detrender"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Transformer
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn get_params(&self) -> ParamMap {
        match &self.spec {
            TrendSpec::Polynomial(d) => ParamMap::new().with("degree", *d),
            TrendSpec::Forecaster(f) => {
                let mut p = ParamMap::new().with("forecaster", ParamValue::Estimator(f.name().into()));
                p.extend_prefixed("forecaster", f.get_params());
                p
            }
        }
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let (own, nested) = updates.split_nested();
        let mut spec = self.spec.duplicate();
        for (name, value) in own {
            match name {
                "degree" => spec = TrendSpec::Polynomial(value.as_usize(name)?),
                "forecaster" => spec = TrendSpec::Forecaster(forecaster_from_name(value.as_str(name)?)?),
                other => return Err(Error::UnknownParameter(other.to_string())),
            }
        }
        for (component, params) in nested {
            match (&mut spec, component.as_str()) {
                (TrendSpec::Forecaster(f), "forecaster") => {
                    f.set_params(&params).map_err(|e| prefix_error("forecaster", e))?
                }
                _ => {
                    let first = params.iter().next().map_or(String::new(), |(k, _)| k.to_string());
                    return Err(Error::UnknownParameter(format!("{component}__{first}")));
                }
            }
        }
        *self = Self::new(spec);
        Ok(())
    }
}

impl Transformer for Detrender {
    fn input_kind(&self) -> DataKind {
        DataKind::Panel
    }

    fn output_kind(&self) -> DataKind {
        DataKind::Panel
    }

    fn fit(&mut self, data: &Data) -> Result<()> {
        data.as_panel()?;
        self.fitted = true;
        Ok(())
    }

    fn transform(&self, data: &Data) -> Result<Data> {
        if !self.fitted {
            return Err(Error::NotFitted);
        }
        let panel = map_series_cells(data.as_panel()?, |s| {
            let state = detrender_fit(s, &self.spec)?;
            detrend_transform(&state, s)
        })?;
        Ok(Data::Panel(panel))
    }

    fn clone_unfitted(&self) -> Box<dyn Transformer> {
        Box::new(Self::new(self.spec.duplicate()))
    }
}
