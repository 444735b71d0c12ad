use rayon::prelude::*;

use super::{check_n_targets, single_column_series, TimeSeriesClassifier, TimeSeriesRegressor};
use crate::data::{Panel, TimeSeries};
use crate::distances::{DistanceKind, DistanceSpec};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, Label, ParamMap, ParamValue};
use crate::tabular::majority_vote;

/// Indices of the `k` training series closest to `query`; ties go to the
/// lower index.
fn nearest(train: &[&TimeSeries], query: &[f64], k: usize, dist: &DistanceSpec) -> Result<Vec<usize>> {
    let n = train.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut d = train
        .iter()
        .enumerate()
        .map(|(i, s)| Ok((dist.distance(s.values(), query)?, i)))
        .collect::<Result<Vec<_>>>()?;
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(d.into_iter().take(k).map(|(_, i)| i).collect())
}

fn check_query(len: usize, query: &TimeSeries) -> Result<()> {
    if query.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            actual: query.len(),
        });
    }
    Ok(())
}

/// Majority label among the `k` nearest training series under `dist`.
pub fn knn_ts_classify(
    train: &Panel,
    labels: &[Label],
    query: &TimeSeries,
    k: usize,
    dist: &DistanceSpec,
) -> Result<Label> {
    check_n_targets(train, labels.len())?;
    let (series, len) = single_column_series(train)?;
    check_query(len, query)?;
    let idx = nearest(&series, query.values(), k, dist)?;
    Ok(majority_vote(idx.iter().map(|&i| labels[i].as_str())).expect("k >= 1"))
}

/// Shared hyper-parameters of the kNN time series estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
struct KnnConfig {
    k: usize,
    dist: DistanceSpec,
}

impl KnnConfig {
    fn params(&self) -> ParamMap {
        let mut p = ParamMap::new()
            .with("distance", self.dist.kind().as_str())
            .with("k", self.k);
        match self.dist.kind() {
            DistanceKind::Dtw | DistanceKind::Ddtw => {
                let band = self.dist.band().map_or(ParamValue::Str("none".into()), ParamValue::Real);
                p.insert("band", band).expect("non-empty name");
            }
            DistanceKind::Wdtw => {
                p.insert("g", self.dist.g().unwrap_or_default()).expect("non-empty name");
            }
            DistanceKind::Euclidean => {}
        }
        p
    }

    /// Applies updates atomically. Switching the distance kind drops
    /// parameters of the old kind unless they are set again.
    fn apply(&self, updates: &ParamMap) -> Result<Self> {
        let mut k = self.k;
        let mut kind = self.dist.kind();
        let mut band: Option<Option<f64>> = None;
        let mut g: Option<f64> = None;
        for (name, value) in updates.iter() {
            match name {
                "k" => k = value.as_usize(name)?,
                "distance" => kind = DistanceKind::parse(value.as_str(name)?)?,
                "band" => {
                    band = Some(match value {
                        ParamValue::Str(s) if s == "none" => None,
                        other => Some(other.as_f64(name)?),
                    })
                }
                "g" => g = Some(value.as_f64(name)?),
                other => return Err(Error::UnknownParameter(other.to_string())),
            }
        }
        if k == 0 {
            return Err(Error::InvalidParameter {
                name: "k".into(),
                reason: "must be >= 1".into(),
            });
        }
        let same_kind = kind == self.dist.kind();
        let band = band.unwrap_or(if same_kind { self.dist.band() } else { None });
        let g = g.or(if same_kind { self.dist.g() } else { None });
        Ok(Self {
            k,
            dist: DistanceSpec::new(kind, band, g)?,
        })
    }
}

/// k-nearest-neighbour classifier over a configurable series distance.
#[derive(Debug, Clone)]
pub struct KnnTimeSeriesClassifier {
    config: KnnConfig,
    fitted: Option<(Vec<TimeSeries>, Vec<Label>, usize)>,
}

impl KnnTimeSeriesClassifier {
    pub fn new(k: usize, dist: DistanceSpec) -> Self {
        Self {
            config: KnnConfig { k, dist },
            fitted: None,
        }
    }

    pub fn distance(&self) -> &DistanceSpec {
        &self.config.dist
    }
}

impl Estimator for KnnTimeSeriesClassifier {
    fn name(&self) -> &'static str {
        "knn_ts"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TimeSeriesClassifier
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn get_params(&self) -> ParamMap {
        self.config.params()
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        self.config = self.config.apply(updates)?;
        self.fitted = None;
        Ok(())
    }
}

impl TimeSeriesClassifier for KnnTimeSeriesClassifier {
    fn fit(&mut self, x: &Panel, y: &[Label]) -> Result<()> {
        check_n_targets(x, y.len())?;
        let (series, len) = single_column_series(x)?;
        if self.config.k > series.len() {
            return Err(Error::InvalidK {
                k: self.config.k,
                n: series.len(),
            });
        }
        self.fitted = Some((series.into_iter().cloned().collect(), y.to_vec(), len));
        Ok(())
    }

    fn predict(&self, x: &Panel) -> Result<Vec<Label>> {
        let (train, labels, len) = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        let (queries, _) = single_column_series(x)?;
        let refs: Vec<&TimeSeries> = train.iter().collect();
        queries
            .par_iter()
            .map(|q| {
                check_query(*len, q)?;
                let idx = nearest(&refs, q.values(), self.config.k, &self.config.dist)?;
                Ok(majority_vote(idx.iter().map(|&i| labels[i].as_str())).expect("k >= 1"))
            })
            .collect()
    }

    fn clone_unfitted(&self) -> Box<dyn TimeSeriesClassifier> {
        Box::new(Self::new(self.config.k, self.config.dist))
    }
}

/// k-nearest-neighbour regressor: mean target of the nearest series.
#[derive(Debug, Clone)]
pub struct KnnTimeSeriesRegressor {
    config: KnnConfig,
    fitted: Option<(Vec<TimeSeries>, Vec<f64>, usize)>,
}

impl KnnTimeSeriesRegressor {
    pub fn new(k: usize, dist: DistanceSpec) -> Self {
        Self {
            config: KnnConfig { k, dist },
            fitted: None,
        }
    }
}

impl Estimator for KnnTimeSeriesRegressor {
    fn name(&self) -> &'static str {
        "knn_ts"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TimeSeriesRegressor
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn get_params(&self) -> ParamMap {
        self.config.params()
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        self.config = self.config.apply(updates)?;
        self.fitted = None;
        Ok(())
    }
}

impl TimeSeriesRegressor for KnnTimeSeriesRegressor {
    fn fit(&mut self, x: &Panel, y: &[f64]) -> Result<()> {
        check_n_targets(x, y.len())?;
        let (series, len) = single_column_series(x)?;
        if self.config.k > series.len() {
            return Err(Error::InvalidK {
                k: self.config.k,
                n: series.len(),
            });
        }
        self.fitted = Some((series.into_iter().cloned().collect(), y.to_vec(), len));
        Ok(())
    }

    fn predict(&self, x: &Panel) -> Result<Vec<f64>> {
        let (train, targets, len) = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        let (queries, _) = single_column_series(x)?;
        let refs: Vec<&TimeSeries> = train.iter().collect();
        queries
            .par_iter()
            .map(|q| {
                check_query(*len, q)?;
                let idx = nearest(&refs, q.values(), self.config.k, &self.config.dist)?;
                Ok(idx.iter().map(|&i| targets[i]).sum::<f64>() / idx.len() as f64)
            })
            .collect()
    }

    fn clone_unfitted(&self) -> Box<dyn TimeSeriesRegressor> {
        Box::new(Self::new(self.config.k, self.config.dist))
    }
}
