//! Shared estimator contract: hyper-parameter access, fitted-state tracking
//! and the forecasting horizon.
//!
//! Hyper-parameters of nested components are addressed with a double
//! underscore path, e.g. `regressor__k` reaches the `k` parameter of the
//! component stored under `regressor`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Separator between a component name and its parameter path.
pub const NESTED_SEPARATOR: &str = "__";

/// Class label used by all classifiers.
pub type Label = String;

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Real(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    /// Registered name of a nested component estimator.
    Estimator(String),
}

impl ParamValue {
    /// Parses a command-line style value: integer, then real, then boolean,
    /// falling back to a string.
    pub fn parse(raw: &str) -> ParamValue {
        let raw = raw.trim();
        if let Ok(i) = raw.parse::<i64>() {
            ParamValue::Int(i)
        } else if let Ok(f) = raw.parse::<f64>() {
            ParamValue::Real(f)
        } else if let Ok(b) = raw.parse::<bool>() {
            ParamValue::Bool(b)
        } else {
            ParamValue::Str(raw.to_string())
        }
    }

    pub fn from_json(value: &serde_json::Value) -> Option<ParamValue> {
        use serde_json::Value;
        match value {
            Value::Bool(b) => Some(ParamValue::Bool(*b)),
            Value::Number(n) => n
                .as_i64()
                .map(ParamValue::Int)
                .or_else(|| n.as_f64().map(ParamValue::Real)),
            Value::String(s) => Some(ParamValue::Str(s.clone())),
            _ => None,
        }
    }

    pub fn as_f64(&self, name: &str) -> Result<f64> {
        match self {
            ParamValue::Real(v) => Ok(*v),
            ParamValue::Int(v) => Ok(*v as f64),
            _ => Err(mismatch(name, "a number")),
        }
    }

    pub fn as_i64(&self, name: &str) -> Result<i64> {
        match self {
            ParamValue::Int(v) => Ok(*v),
            _ => Err(mismatch(name, "an integer")),
        }
    }

    pub fn as_usize(&self, name: &str) -> Result<usize> {
        let v = self.as_i64(name)?;
        usize::try_from(v).map_err(|_| Error::InvalidParameter {
            name: name.to_string(),
            reason: format!("{v} is negative"),
        })
    }

    pub fn as_u64(&self, name: &str) -> Result<u64> {
        Ok(self.as_usize(name)? as u64)
    }

    pub fn as_bool(&self, name: &str) -> Result<bool> {
        match self {
            ParamValue::Bool(b) => Ok(*b),
            _ => Err(mismatch(name, "a boolean")),
        }
    }

    pub fn as_str(&self, name: &str) -> Result<&str> {
        match self {
            ParamValue::Str(s) | ParamValue::Estimator(s) => Ok(s),
            _ => Err(mismatch(name, "a string")),
        }
    }
}

fn mismatch(name: &str, expected: &'static str) -> Error {
    Error::TypeMismatch {
        name: name.to_string(),
        expected,
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Str(s) | ParamValue::Estimator(s) => f.write_str(s),
            ParamValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Real(v)
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Str(v.to_string())
    }
}

/// Ordered (lexicographic) map of parameter paths to values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamMap(BTreeMap<String, ParamValue>);

impl ParamMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style insert. Panics on an empty name.
    pub fn with(mut self, name: &str, value: impl Into<ParamValue>) -> Self {
        self.insert(name, value).expect("parameter names are non-empty");
        self
    }

    pub fn insert(&mut self, name: &str, value: impl Into<ParamValue>) -> Result<()> {
        if name.is_empty() {
            return Err(Error::UnknownParameter(String::new()));
        }
        self.0.insert(name.to_string(), value.into());
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ParamValue)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extend(&mut self, other: ParamMap) {
        self.0.extend(other.0);
    }

    /// Adds every entry of `nested` under `prefix__`.
    pub fn extend_prefixed(&mut self, prefix: &str, nested: ParamMap) {
        for (k, v) in nested.0 {
            self.0.insert(format!("{prefix}{NESTED_SEPARATOR}{k}"), v);
        }
    }

    /// Separates own parameters from nested `component__param` paths,
    /// grouping the latter by component name.
    pub fn split_nested(&self) -> (Vec<(&str, &ParamValue)>, BTreeMap<String, ParamMap>) {
        let mut own = Vec::new();
        let mut nested: BTreeMap<String, ParamMap> = BTreeMap::new();
        for (key, value) in &self.0 {
            match key.split_once(NESTED_SEPARATOR) {
                Some((component, rest)) if !component.is_empty() && !rest.is_empty() => {
                    nested
                        .entry(component.to_string())
                        .or_default()
                        .0
                        .insert(rest.to_string(), value.clone());
                }
                _ => own.push((key.as_str(), value)),
            }
        }
        (own, nested)
    }
}

impl FromIterator<(String, ParamValue)> for ParamMap {
    fn from_iter<I: IntoIterator<Item = (String, ParamValue)>>(iter: I) -> Self {
        ParamMap(iter.into_iter().collect())
    }
}

/// Re-prefixes an error raised by a nested component so the reported path is
/// the full path the caller used.
pub fn prefix_error(component: &str, err: Error) -> Error {
    match err {
        Error::UnknownParameter(p) => {
            Error::UnknownParameter(format!("{component}{NESTED_SEPARATOR}{p}"))
        }
        Error::TypeMismatch { name, expected } => Error::TypeMismatch {
            name: format!("{component}{NESTED_SEPARATOR}{name}"),
            expected,
        },
        Error::InvalidParameter { name, reason } => Error::InvalidParameter {
            name: format!("{component}{NESTED_SEPARATOR}{name}"),
            reason,
        },
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Forecaster,
    TimeSeriesClassifier,
    TimeSeriesRegressor,
    Transformer,
    TabularRegressor,
    TabularClassifier,
}

/// Contract shared by every estimator and transformer.
///
/// `set_params` leaves the estimator unfitted; an error leaves it unchanged.
pub trait Estimator: Send + Sync {
    /// Registered name, used when the estimator is referenced as a nested
    /// component.
    fn name(&self) -> &'static str;

    fn kind(&self) -> EstimatorKind;

    fn is_fitted(&self) -> bool;

    fn get_params(&self) -> ParamMap;

    fn set_params(&mut self, updates: &ParamMap) -> Result<()>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizonMode {
    /// Positive step offsets from the cutoff.
    Relative,
    /// Explicit time points.
    Absolute,
}

/// Time points ahead of the cutoff at which forecasts are requested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForecastingHorizon {
    mode: HorizonMode,
    points: Vec<i64>,
}

impl ForecastingHorizon {
    pub fn relative(steps: Vec<i64>) -> Result<Self> {
        validate_increasing(&steps)?;
        if steps[0] < 1 {
            return Err(Error::InvalidHorizon(format!(
                "relative steps must be >= 1, got {}",
                steps[0]
            )));
        }
        Ok(Self {
            mode: HorizonMode::Relative,
            points: steps,
        })
    }

    /// Relative horizon `1..=h`.
    pub fn steps_ahead(h: usize) -> Result<Self> {
        Self::relative((1..=h as i64).collect())
    }

    pub fn absolute(points: Vec<i64>) -> Result<Self> {
        validate_increasing(&points)?;
        Ok(Self {
            mode: HorizonMode::Absolute,
            points,
        })
    }

    pub fn mode(&self) -> HorizonMode {
        self.mode
    }

    pub fn points(&self) -> &[i64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Absolute time points for a series whose last observation is `cutoff`
    /// and whose spacing is `step`.
    pub fn to_absolute(&self, cutoff: i64, step: i64) -> Result<Vec<i64>> {
        match self.mode {
            HorizonMode::Relative => Ok(self.points.iter().map(|s| cutoff + s * step).collect()),
            HorizonMode::Absolute => {
                if let Some(&point) = self.points.iter().find(|&&p| p <= cutoff) {
                    return Err(Error::HorizonNotInFuture { point, cutoff });
                }
                Ok(self.points.clone())
            }
        }
    }

    /// Step offsets relative to `cutoff`. Absolute points must lie on the
    /// `step` grid after the cutoff.
    pub fn to_relative(&self, cutoff: i64, step: i64) -> Result<Vec<i64>> {
        match self.mode {
            HorizonMode::Relative => Ok(self.points.clone()),
            HorizonMode::Absolute => self
                .points
                .iter()
                .map(|&p| {
                    if p <= cutoff {
                        return Err(Error::HorizonNotInFuture { point: p, cutoff });
                    }
                    let delta = p - cutoff;
                    if delta % step != 0 {
                        return Err(Error::InvalidHorizon(format!(
                            "point {p} is off the step-{step} grid from cutoff {cutoff}"
                        )));
                    }
                    Ok(delta / step)
                })
                .collect(),
        }
    }
}

fn validate_increasing(points: &[i64]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidHorizon("empty".into()));
    }
    if points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidHorizon("points must be strictly increasing".into()));
    }
    Ok(())
}
