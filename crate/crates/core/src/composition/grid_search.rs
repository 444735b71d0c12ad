use std::collections::BTreeMap;

use rayon::prelude::*;

use super::split::{temporal_split, SplitSpec};
use crate::data::TimeSeries;
use crate::error::{Error, Result};
use crate::estimator::{ForecastingHorizon, ParamMap, ParamValue};
use crate::forecasting::Forecaster;

/// Candidate values per parameter path.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Grid(BTreeMap<String, Vec<ParamValue>>);

impl Grid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, path: &str, values: Vec<ParamValue>) -> Self {
        self.0.insert(path.to_string(), values);
        self
    }

    /// Cartesian product in lexicographic order: the first path (in sorted
    /// order) varies slowest.
    pub fn points(&self) -> Result<Vec<ParamMap>> {
        if self.0.is_empty() {
            return Err(Error::EmptyInput("parameter grid is empty".into()));
        }
        let mut points = vec![ParamMap::new()];
        for (path, values) in &self.0 {
            if values.is_empty() {
                return Err(Error::InvalidParameter {
                    name: path.clone(),
                    reason: "no candidate values".into(),
                });
            }
            let mut next = Vec::with_capacity(points.len() * values.len());
            for p in &points {
                for v in values {
                    let mut q = p.clone();
                    q.insert(path, v.clone())?;
                    next.push(q);
                }
            }
            points = next;
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvRow {
    /// Position of the grid point in enumeration order.
    pub point: usize,
    pub params: ParamMap,
    pub fold: usize,
    pub score: f64,
}

pub struct GridSearchResult {
    pub best_params: ParamMap,
    pub best_score: f64,
    /// One row per grid point and fold, point-major.
    pub cv_table: Vec<CvRow>,
    /// Best configuration refitted on the full series.
    pub forecaster: Box<dyn Forecaster>,
}

/// Temporal cross-validated grid search. `metric(truth, predicted, train)`
/// is minimised; the best point is the lowest mean score over folds, ties
/// going to the earliest point. NaN means count as worst.
pub fn grid_search_forecaster<M>(
    y: &TimeSeries,
    forecaster: &dyn Forecaster,
    grid: &Grid,
    spec: &SplitSpec,
    metric: M,
) -> Result<GridSearchResult>
where
    M: Fn(&[f64], &[f64], &[f64]) -> Result<f64> + Sync,
{
    let points = grid.points()?;
    let folds = temporal_split(y.len(), spec)?;
    let prototypes = points
        .iter()
        .map(|p| {
            let mut f = forecaster.clone_unfitted();
            f.set_params(p)?;
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    let fh = ForecastingHorizon::steps_ahead(spec.fh_length)?;

    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..folds.len()).map(move |f| (p, f)))
        .collect();
    let scores = jobs
        .par_iter()
        .map(|&(p, k)| {
            let fold = &folds[k];
            let train = y.slice(fold.train.start, fold.train.end)?;
            let test = &y.values()[fold.test.clone()];
            let mut f = prototypes[p].clone_unfitted();
            f.fit(&train, Some(&fh))?;
            let pred = f.predict(&fh)?;
            metric(test, pred.values(), train.values())
        })
        .collect::<Result<Vec<f64>>>()?;

    let cv_table: Vec<CvRow> = jobs
        .iter()
        .zip(&scores)
        .map(|(&(p, k), &score)| CvRow {
            point: p,
            params: points[p].clone(),
            fold: k,
            score,
        })
        .collect();

    let n_folds = folds.len() as f64;
    let means: Vec<f64> = scores.chunks(folds.len()).map(|c| c.iter().sum::<f64>() / n_folds).collect();
    let mut best = 0;
    for (i, &m) in means.iter().enumerate() {
        if m < means[best] || (means[best].is_nan() && !m.is_nan()) {
            best = i;
        }
    }

    let mut refit = prototypes[best].clone_unfitted();
    refit.fit(y, Some(&fh))?;
    Ok(GridSearchResult {
        best_params: points[best].clone(),
        best_score: means[best],
        cv_table,
        forecaster: refit,
    })
}
