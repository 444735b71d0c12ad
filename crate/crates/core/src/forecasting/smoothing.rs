//! Simple exponential smoothing and Holt's linear trend method.

use super::{series_at, Forecaster, TrainingFrame};
use crate::data::{TimeIndex, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, ForecastingHorizon, ParamMap, ParamValue};

/// Candidate smoothing parameters tried when one is left unspecified.
pub const SMOOTHING_GRID: [f64; 19] = [
    0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75,
    0.80, 0.85, 0.90, 0.95,
];

const AUTO: &str = "auto";

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingState {
    pub alpha: f64,
    /// Present for the trend variant only.
    pub beta: Option<f64>,
    pub level: f64,
    pub trend_term: Option<f64>,
    pub training_index: TimeIndex,
}

/// `w·x + (1−w)·y`, returning `x` unchanged when both inputs agree so a
/// constant input stays exactly constant.
fn mix(w: f64, x: f64, y: f64) -> f64 {
    if x == y {
        x
    } else {
        w * x + (1.0 - w) * y
    }
}

/// Runs the recursion and returns the one-step-ahead fitted values along
/// with the final level and trend.
fn run(values: &[f64], alpha: f64, beta: Option<f64>) -> (Vec<f64>, f64, Option<f64>) {
    let mut level = values[0];
    let mut trend = beta.map(|_| values[1] - values[0]);
    let mut fitted = Vec::with_capacity(values.len());
    fitted.push(level);
    for &y in &values[1..] {
        let prev = level;
        let forecast = match trend {
            Some(b) => prev + b,
            None => prev,
        };
        fitted.push(forecast);
        level = mix(alpha, y, forecast);
        if let (Some(b), Some(beta)) = (trend, beta) {
            trend = Some(mix(beta, level - prev, b));
        }
    }
    (fitted, level, trend)
}

fn sse(values: &[f64], fitted: &[f64]) -> f64 {
    values.iter().zip(fitted).map(|(y, f)| (y - f) * (y - f)).sum()
}

fn check_unit(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(x > 0.0 && x <= 1.0) => Err(Error::InvalidParameter {
            name: name.into(),
            reason: format!("{x} is outside (0, 1]"),
        }),
        _ => Ok(()),
    }
}

/// Fits smoothing parameters and the final state on `y`. `trend` selects
/// Holt's method; `None` parameters are chosen from [`SMOOTHING_GRID`] by
/// in-sample one-step squared error, ties going to the smaller value.
pub fn exp_smoothing_fit(
    y: &TimeSeries,
    alpha: Option<f64>,
    beta: Option<f64>,
    trend: bool,
) -> Result<SmoothingState> {
    check_unit("alpha", alpha)?;
    check_unit("beta", beta)?;
    let needed = if trend { 3 } else { 2 };
    if y.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            actual: y.len(),
        });
    }
    let v = y.values();
    let alphas: Vec<f64> = alpha.map_or(SMOOTHING_GRID.to_vec(), |a| vec![a]);
    let betas: Vec<Option<f64>> = if trend {
        beta.map_or(SMOOTHING_GRID.iter().map(|&b| Some(b)).collect(), |b| vec![Some(b)])
    } else {
        vec![None]
    };
    let mut best: Option<(f64, f64, Option<f64>)> = None;
    for &a in &alphas {
        for &b in &betas {
            let (fitted, _, _) = run(v, a, b);
            let score = sse(v, &fitted);
            if best.is_none_or(|(s, _, _)| score < s) {
                best = Some((score, a, b));
            }
        }
    }
    let (_, alpha, beta) = best.expect("grid is non-empty");
    let (_, level, trend_term) = run(v, alpha, beta);
    Ok(SmoothingState {
        alpha,
        beta,
        level,
        trend_term,
        training_index: y.index().clone(),
    })
}

pub fn exp_smoothing_predict(state: &SmoothingState, fh: &ForecastingHorizon) -> Result<TimeSeries> {
    let frame = frame_of(state)?;
    let (relative, absolute) = frame.resolve(fh)?;
    let values = relative
        .iter()
        .map(|&h| match state.trend_term {
            Some(b) => state.level + h as f64 * b,
            None => state.level,
        })
        .collect();
    series_at(absolute, values)
}

/// One-step-ahead fitted values over `y`, the series the state was fitted
/// on; the first fitted value is the initial level.
pub fn exp_smoothing_insample(state: &SmoothingState, y: &TimeSeries) -> Result<TimeSeries> {
    if y.index() != &state.training_index {
        return Err(Error::InvalidParameter {
            name: "y".into(),
            reason: "series differs from the training series".into(),
        });
    }
    let (fitted, _, _) = run(y.values(), state.alpha, state.beta);
    TimeSeries::new(y.index().clone(), fitted)
}

fn frame_of(state: &SmoothingState) -> Result<TrainingFrame> {
    let index = &state.training_index;
    Ok(TrainingFrame {
        start: index.first(),
        step: index.step().ok_or(Error::UnequalSpacing)?,
        len: index.len(),
    })
}

/// Exponential smoothing forecaster; with `trend` set it is Holt's method.
#[derive(Debug, Clone)]
pub struct ExponentialSmoothingForecaster {
    alpha: Option<f64>,
    beta: Option<f64>,
    trend: bool,
    fitted: Option<(SmoothingState, TimeSeries, TrainingFrame)>,
}

impl ExponentialSmoothingForecaster {
    pub fn ses(alpha: Option<f64>) -> Self {
        Self {
            alpha,
            beta: None,
            trend: false,
            fitted: None,
        }
    }

    pub fn holt(alpha: Option<f64>, beta: Option<f64>) -> Self {
        Self {
            alpha,
            beta,
            trend: true,
            fitted: None,
        }
    }

    pub fn state(&self) -> Option<&SmoothingState> {
        self.fitted.as_ref().map(|f| &f.0)
    }

    fn fitted(&self) -> Result<&(SmoothingState, TimeSeries, TrainingFrame)> {
        self.fitted.as_ref().ok_or(Error::NotFitted)
    }
}

fn optional_param(v: Option<f64>) -> ParamValue {
    v.map_or(ParamValue::Str(AUTO.into()), ParamValue::Real)
}

fn parse_optional(name: &str, value: &ParamValue) -> Result<Option<f64>> {
    match value {
        ParamValue::Str(s) if s == AUTO => Ok(None),
        other => {
            let v = other.as_f64(name)?;
            check_unit(name, Some(v))?;
            Ok(Some(v))
        }
    }
}

impl Estimator for ExponentialSmoothingForecaster {
    fn name(&self) -> &'static str {
        if self.trend {
            "holt"
        } else {
            "ses"
        }
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Forecaster
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new()
            .with("alpha", optional_param(self.alpha))
            .with("beta", optional_param(self.beta))
            .with("trend", self.trend)
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let mut next = Self {
            fitted: None,
            ..self.clone()
        };
        for (name, value) in updates.iter() {
            match name {
                "alpha" => next.alpha = parse_optional(name, value)?,
                "beta" => next.beta = parse_optional(name, value)?,
                "trend" => next.trend = value.as_bool(name)?,
                other => return Err(Error::UnknownParameter(other.to_string())),
            }
        }
        *self = next;
        Ok(())
    }
}

impl Forecaster for ExponentialSmoothingForecaster {
    fn fit(&mut self, y: &TimeSeries, _fh: Option<&ForecastingHorizon>) -> Result<()> {
        let frame = TrainingFrame::of(y)?;
        let state = exp_smoothing_fit(y, self.alpha, self.beta, self.trend)?;
        self.fitted = Some((state, y.clone(), frame));
        Ok(())
    }

    fn predict(&self, fh: &ForecastingHorizon) -> Result<TimeSeries> {
        exp_smoothing_predict(&self.fitted()?.0, fh)
    }

    fn predict_in_sample(&self, times: &[i64]) -> Result<TimeSeries> {
        let (state, y, frame) = self.fitted()?;
        let positions = frame.positions(times)?;
        let all = exp_smoothing_insample(state, y)?;
        let values = positions.iter().map(|&p| all.values()[p]).collect();
        series_at(times.to_vec(), values)
    }

    fn cutoff(&self) -> Option<i64> {
        self.fitted.as_ref().map(|f| f.2.cutoff())
    }

    fn clone_unfitted(&self) -> Box<dyn Forecaster> {
        Box::new(Self {
            fitted: None,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecasting::{naive_forecast, NaiveStrategy};
    use proptest::prelude::*;

    fn y(values: &[f64]) -> TimeSeries {
        TimeSeries::from_values(values.to_vec()).unwrap()
    }

    #[test]
    fn one_step_by_hand() {
        let s = exp_smoothing_fit(&y(&[2., 4.]), Some(0.5), None, false).unwrap();
        assert_eq!(s.level, 3.0);
        let fh = ForecastingHorizon::relative(vec![1]).unwrap();
        assert_eq!(exp_smoothing_predict(&s, &fh).unwrap().values(), &[3.]);
    }

    #[test]
    fn insample_by_hand() {
        let series = y(&[2., 4., 4.]);
        let s = exp_smoothing_fit(&series, Some(0.5), None, false).unwrap();
        assert_eq!(exp_smoothing_insample(&s, &series).unwrap().values(), &[2., 2., 3.]);
    }

    #[test]
    fn constant_series_picks_smallest_alpha() {
        let series = y(&[4.; 8]);
        let s = exp_smoothing_fit(&series, None, None, false).unwrap();
        assert_eq!(s.alpha, 0.05);
        assert_eq!(s.level, 4.0);
        assert!(exp_smoothing_insample(&s, &series).unwrap().values().iter().all(|&v| v == 4.0));
        let h = exp_smoothing_fit(&series, None, None, true).unwrap();
        assert_eq!((h.alpha, h.beta), (0.05, Some(0.05)));
    }

    #[test]
    fn holt_linear_continuation() {
        let state = SmoothingState {
            alpha: 0.5,
            beta: Some(0.5),
            level: 10.0,
            trend_term: Some(2.0),
            training_index: TimeIndex::range(5).unwrap(),
        };
        let fh = ForecastingHorizon::relative(vec![1, 2]).unwrap();
        assert_eq!(exp_smoothing_predict(&state, &fh).unwrap().values(), &[12., 14.]);
        let past = ForecastingHorizon::absolute(vec![4]).unwrap();
        assert!(matches!(
            exp_smoothing_predict(&state, &past),
            Err(Error::HorizonNotInFuture { .. })
        ));
    }

    #[test]
    fn holt_tracks_exact_line() {
        let series = y(&[1., 3., 5., 7., 9.]);
        let s = exp_smoothing_fit(&series, Some(0.3), Some(0.4), true).unwrap();
        assert_eq!((s.level, s.trend_term), (9.0, Some(2.0)));
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            exp_smoothing_fit(&y(&[1., 2.]), Some(0.0), None, false),
            Err(Error::InvalidParameter { .. })
        ));
        assert_eq!(
            exp_smoothing_fit(&y(&[1., 2.]), None, None, true),
            Err(Error::SeriesTooShort { needed: 3, actual: 2 })
        );
        let mut f = ExponentialSmoothingForecaster::ses(None);
        assert!(f.set_params(&ParamMap::new().with("alpha", 1.5)).is_err());
        assert_eq!(f.get_params().get("alpha"), Some(&ParamValue::Str("auto".into())));
        f.set_params(&ParamMap::new().with("alpha", 1.0)).unwrap();
        assert_eq!(f.get_params().get("alpha"), Some(&ParamValue::Real(1.0)));
        f.set_params(&ParamMap::new().with("trend", true)).unwrap();
        assert_eq!(f.name(), "holt");
    }

    #[test]
    fn forecaster_insample_subset() {
        let mut f = ExponentialSmoothingForecaster::ses(Some(1.0));
        assert_eq!(f.predict_in_sample(&[0]), Err(Error::NotFitted));
        f.fit(&y(&[5., 6., 8.]), None).unwrap();
        assert_eq!(f.predict_in_sample(&[0, 2]).unwrap().values(), &[5., 6.]);
    }

    proptest! {
        #[test]
        fn alpha_one_is_naive_last(values in proptest::collection::vec(-1e6f64..1e6, 2..50)) {
            let s = y(&values);
            let fh = ForecastingHorizon::relative(vec![1, 2, 7]).unwrap();
            let mut f = ExponentialSmoothingForecaster::ses(Some(1.0));
            f.fit(&s, None).unwrap();
            prop_assert_eq!(f.predict(&fh).unwrap(), naive_forecast(&s, &fh, NaiveStrategy::Last).unwrap());
        }
    }
}
