//! Series-to-primitives transformers.

use super::{Data, DataKind, Transformer};
use crate::data::{Panel, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, ParamMap};
use crate::tabular::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryFeature {
    Mean,
    /// Sample standard deviation (divisor T−1).
    Std,
    /// Least-squares slope against positions 0…T−1.
    Slope,
    Min,
    Max,
    Median,
}

impl SummaryFeature {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name.trim() {
            "mean" => SummaryFeature::Mean,
            "std" => SummaryFeature::Std,
            "slope" => SummaryFeature::Slope,
            "min" => SummaryFeature::Min,
            "max" => SummaryFeature::Max,
            "median" => SummaryFeature::Median,
            other => {
                return Err(Error::InvalidParameter {
                    name: "features".into(),
                    reason: format!("unknown feature `{other}`"),
                })
            }
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SummaryFeature::Mean => "mean",
            SummaryFeature::Std => "std",
            SummaryFeature::Slope => "slope",
            SummaryFeature::Min => "min",
            SummaryFeature::Max => "max",
            SummaryFeature::Median => "median",
        }
    }

    fn min_length(&self) -> usize {
        match self {
            SummaryFeature::Std | SummaryFeature::Slope => 2,
            _ => 1,
        }
    }
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub(crate) fn sample_std(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

pub(crate) fn slope(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let tm = (n - 1.0) / 2.0;
    let ym = mean(v);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, y) in v.iter().enumerate() {
        let dt = i as f64 - tm;
        sxy += dt * (y - ym);
        sxx += dt * dt;
    }
    sxy / sxx
}

fn median(v: &[f64]) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

pub fn extract_summary_features(y: &TimeSeries, features: &[SummaryFeature]) -> Result<Vec<f64>> {
    let v = y.values();
    features
        .iter()
        .map(|f| {
            if v.len() < f.min_length() {
                return Err(Error::SeriesTooShort {
                    needed: f.min_length(),
                    actual: v.len(),
                });
            }
            Ok(match f {
                SummaryFeature::Mean => mean(v),
                SummaryFeature::Std => sample_std(v),
                SummaryFeature::Slope => slope(v),
                SummaryFeature::Min => v.iter().copied().fold(f64::INFINITY, f64::min),
                SummaryFeature::Max => v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                SummaryFeature::Median => median(v),
            })
        })
        .collect()
}

/// A series-to-primitives mapping fitted separately on each instance.
pub trait InstanceFeaturizer: Send + Sync {
    /// Fits on one series and returns its feature vector.
    fn fit_transform_instance(&self, series: &TimeSeries) -> Result<Vec<f64>>;
}

/// Builds one table row per instance by concatenating the features of each
/// series column.
fn featurize_panel<F: InstanceFeaturizer + ?Sized>(panel: &Panel, featurizer: &F) -> Result<Matrix> {
    let names = panel.series_column_names();
    if names.is_empty() {
        return Err(Error::EmptyInput("panel has no series columns".into()));
    }
    let mut rows = vec![Vec::new(); panel.n_instances()];
    for name in names {
        for (row, s) in rows.iter_mut().zip(panel.series_column(name)?) {
            row.extend(featurizer.fit_transform_instance(s)?);
        }
    }
    Matrix::from_rows(&rows)
}

/// Transformer wrapper applying an [`InstanceFeaturizer`] to every
/// instance of every series column.
#[derive(Debug, Clone)]
pub struct PerInstanceFeatures<F> {
    featurizer: F,
    fitted: bool,
}

impl<F> PerInstanceFeatures<F> {
    pub fn new(featurizer: F) -> Self {
        Self {
            featurizer,
            fitted: false,
        }
    }
}

impl<F: InstanceFeaturizer + Clone + 'static> Estimator for PerInstanceFeatures<F> {
    fn name(&self) -> &'static str {
        "per_instance"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Transformer
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new()
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        if let Some((name, _)) = updates.iter().next() {
            return Err(Error::UnknownParameter(name.to_string()));
        }
        self.fitted = false;
        Ok(())
    }
}

impl<F: InstanceFeaturizer + Clone + 'static> Transformer for PerInstanceFeatures<F> {
    fn input_kind(&self) -> DataKind {
        DataKind::Panel
    }

    fn output_kind(&self) -> DataKind {
        DataKind::Table
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
        Ok(Data::Table(featurize_panel(data.as_panel()?, &self.featurizer)?))
    }

    fn clone_unfitted(&self) -> Box<dyn Transformer> {
        Box::new(Self::new(self.featurizer.clone()))
    }
}

/// Summary statistics of every series column, one row per instance.
#[derive(Debug, Clone)]
pub struct SummaryFeatures {
    features: Vec<SummaryFeature>,
    fitted: bool,
}

impl SummaryFeatures {
    pub fn new(features: Vec<SummaryFeature>) -> Self {
        Self {
            features,
            fitted: false,
        }
    }
}

impl Default for SummaryFeatures {
    fn default() -> Self {
        Self::new(vec![SummaryFeature::Mean, SummaryFeature::Std, SummaryFeature::Slope])
    }
}

impl InstanceFeaturizer for SummaryFeatures {
    fn fit_transform_instance(&self, series: &TimeSeries) -> Result<Vec<f64>> {
        extract_summary_features(series, &self.features)
    }
}

impl Estimator for SummaryFeatures {
    fn name(&self) -> &'static str {
        "summary"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Transformer
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn get_params(&self) -> ParamMap {
        let names: Vec<&str> = self.features.iter().map(SummaryFeature::as_str).collect();
        ParamMap::new().with("features", names.join(",").as_str())
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let mut features = self.features.clone();
        for (name, value) in updates.iter() {
            match name {
                "features" => {
                    features = value
                        .as_str(name)?
                        .split(',')
                        .map(SummaryFeature::parse)
                        .collect::<Result<_>>()?
                }
                other => return Err(Error::UnknownParameter(other.to_string())),
            }
        }
        *self = Self::new(features);
        Ok(())
    }
}

impl Transformer for SummaryFeatures {
    fn input_kind(&self) -> DataKind {
        DataKind::Panel
    }

    fn output_kind(&self) -> DataKind {
        DataKind::Table
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
        Ok(Data::Table(featurize_panel(data.as_panel()?, self)?))
    }

    fn clone_unfitted(&self) -> Box<dyn Transformer> {
        Box::new(Self::new(self.features.clone()))
    }
}
