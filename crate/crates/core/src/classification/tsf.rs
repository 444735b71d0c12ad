//! Time series forest: trees over interval summary features.

use rayon::prelude::*;

use super::{check_n_targets, single_column_series, TimeSeriesClassifier};
use crate::data::{Panel, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, Label, ParamMap};
use crate::random::derive_seed;
use crate::tabular::{argmax_first, cart_fit, ClassEncoding, Matrix, TreeNode, TreeParams, TreeTarget};
use crate::transformers::{draw_random_intervals, mean, sample_std, slope, Interval, MIN_INTERVAL_LENGTH};

#[derive(Debug, Clone, PartialEq)]
pub struct TsfParams {
    pub n_trees: usize,
    pub seed: u64,
    pub min_interval: usize,
    /// Intervals per tree; `None` means ⌈√T⌉.
    pub n_intervals: Option<usize>,
}

impl Default for TsfParams {
    fn default() -> Self {
        Self {
            n_trees: 200,
            seed: 0,
            min_interval: MIN_INTERVAL_LENGTH,
            n_intervals: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsfModel {
    pub trees: Vec<(Vec<Interval>, TreeNode)>,
    pub classes: Vec<Label>,
    pub series_length: usize,
    pub seed: u64,
}

/// Mean, sample standard deviation and slope of each interval.
fn interval_features(values: &[f64], intervals: &[Interval]) -> Vec<f64> {
    intervals
        .iter()
        .flat_map(|iv| {
            let v = &values[iv.start..iv.end];
            [mean(v), sample_std(v), slope(v)]
        })
        .collect()
}

pub fn tsf_fit(train: &Panel, labels: &[Label], params: &TsfParams) -> Result<TsfModel> {
    if params.n_trees == 0 {
        return Err(Error::InvalidParameter {
            name: "n_trees".into(),
            reason: "must be >= 1".into(),
        });
    }
    check_n_targets(train, labels.len())?;
    let (series, t) = single_column_series(train)?;
    let min_len = params.min_interval.max(2);
    if t < min_len {
        return Err(Error::SeriesTooShort {
            needed: min_len,
            actual: t,
        });
    }
    let n_intervals = params
        .n_intervals
        .unwrap_or_else(|| (t as f64).sqrt().ceil() as usize);
    let encoding = ClassEncoding::fit(labels);
    let classes = encoding.encode(labels);
    let target = TreeTarget::Classification {
        classes: &classes,
        n_classes: encoding.classes.len(),
    };
    let rows: Vec<usize> = (0..series.len()).collect();
    let tree_params = TreeParams {
        max_depth: None,
        min_leaf: 1,
        feature_subset: None,
    };
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(params.seed, i as u64);
            let intervals = draw_random_intervals(t, n_intervals, min_len, seed)?;
            let features: Vec<Vec<f64>> = series
                .iter()
                .map(|s| interval_features(s.values(), &intervals))
                .collect();
            let x = Matrix::from_rows(&features)?;
            let tree = cart_fit(&x, &rows, target, &tree_params, seed)?;
            Ok((intervals, tree))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TsfModel {
        trees,
        classes: encoding.classes,
        series_length: t,
        seed: params.seed,
    })
}

/// Majority vote of the trees; ties go to the smallest label.
pub fn tsf_predict(model: &TsfModel, query: &TimeSeries) -> Result<Label> {
    if query.len() != model.series_length {
        return Err(Error::LengthMismatch {
            expected: model.series_length,
            actual: query.len(),
        });
    }
    let mut votes = vec![0.0; model.classes.len()];
    for (intervals, tree) in &model.trees {
        let row = interval_features(query.values(), intervals);
        votes[tree.predict_class(&row)] += 1.0;
    }
    Ok(model.classes[argmax_first(&votes)].clone())
}

#[derive(Debug, Clone, Default)]
pub struct TimeSeriesForest {
    params: TsfParams,
    model: Option<TsfModel>,
}

impl TimeSeriesForest {
    pub fn new(params: TsfParams) -> Self {
        Self {
            params,
            model: None,
        }
    }

    pub fn model(&self) -> Option<&TsfModel> {
        self.model.as_ref()
    }
}

impl Estimator for TimeSeriesForest {
    fn name(&self) -> &'static str {
        "tsf"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TimeSeriesClassifier
    }

    fn is_fitted(&self) -> bool {
        self.model.is_some()
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new()
            .with("min_interval", self.params.min_interval)
            .with("n_intervals", self.params.n_intervals.unwrap_or(0))
            .with("n_trees", self.params.n_trees)
            .with("seed", self.params.seed)
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let mut next = self.params.clone();
        for (name, value) in updates.iter() {
            match name {
                "min_interval" => next.min_interval = value.as_usize(name)?,
                "n_intervals" => {
                    let n = value.as_usize(name)?;
                    next.n_intervals = (n > 0).then_some(n);
                }
                "n_trees" => next.n_trees = value.as_usize(name)?,
                "seed" => next.seed = value.as_u64(name)?,
                other => return Err(Error::UnknownParameter(other.to_string())),
            }
        }
        if next.n_trees == 0 {
            return Err(Error::InvalidParameter {
                name: "n_trees".into(),
                reason: "must be >= 1".into(),
            });
        }
        if next.min_interval < 2 {
            return Err(Error::InvalidParameter {
                name: "min_interval".into(),
                reason: "must be >= 2".into(),
            });
        }
        *self = Self::new(next);
        Ok(())
    }
}

impl TimeSeriesClassifier for TimeSeriesForest {
    fn fit(&mut self, x: &Panel, y: &[Label]) -> Result<()> {
        self.model = Some(tsf_fit(x, y, &self.params)?);
        Ok(())
    }

    fn predict(&self, x: &Panel) -> Result<Vec<Label>> {
        let model = self.model.as_ref().ok_or(Error::NotFitted)?;
        let (series, _) = single_column_series(x)?;
        series.par_iter().map(|s| tsf_predict(model, s)).collect()
    }

    fn clone_unfitted(&self) -> Box<dyn TimeSeriesClassifier> {
        Box::new(Self::new(self.params.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng_from;
    use rand_distr::{Distribution, Normal};

    fn level_shift(n_per_class: usize, t: usize, seed: u64) -> (Panel, Vec<Label>) {
        let mut rng = rng_from(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut series = Vec::new();
        let mut labels = Vec::new();
        for i in 0..2 * n_per_class {
            let level = (i % 2) as f64;
            let v: Vec<f64> = (0..t).map(|_| level + noise.sample(&mut rng)).collect();
            series.push(TimeSeries::from_values(v).unwrap());
            labels.push(if level == 0.0 { "low" } else { "high" }.to_string());
        }
        (Panel::from_series("x", series).unwrap(), labels)
    }

    #[test]
    fn whole_series_interval_separates_levels() {
        let (panel, y) = level_shift(10, 20, 3);
        let params = TsfParams { n_trees: 1, min_interval: 20, n_intervals: Some(1), ..TsfParams::default() };
        let model = tsf_fit(&panel, &y, &params).unwrap();
        assert_eq!(model.trees[0].0, vec![Interval::new(0, 20)]);
        let (series, _) = single_column_series(&panel).unwrap();
        for (s, label) in series.iter().zip(&y) {
            assert_eq!(&tsf_predict(&model, s).unwrap(), label);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let (panel, y) = level_shift(8, 16, 4);
        let fit = || {
            let mut f = TimeSeriesForest::new(TsfParams { n_trees: 10, seed: 9, ..TsfParams::default() });
            f.fit(&panel, &y).unwrap();
            f
        };
        let (a, b) = (fit(), fit());
        assert_eq!(a.model(), b.model());
        assert_eq!(a.predict(&panel).unwrap(), b.predict(&panel).unwrap());
        assert_eq!(a.model().unwrap().trees[0].0.len(), 4);
    }

    #[test]
    fn errors_and_params() {
        let (panel, y) = level_shift(2, 2, 1);
        assert_eq!(
            tsf_fit(&panel, &y, &TsfParams::default()),
            Err(Error::SeriesTooShort { needed: 3, actual: 2 })
        );
        let mut f = TimeSeriesForest::default();
        assert_eq!(f.predict(&panel), Err(Error::NotFitted));
        assert!(f.set_params(&ParamMap::new().with("n_trees", 0usize)).is_err());
        f.set_params(&ParamMap::new().with("n_trees", 5usize).with("seed", 3u64)).unwrap();
        assert_eq!(f.get_params().get("n_trees").unwrap().as_usize("n_trees").unwrap(), 5);
    }
}
