use rand::Rng as _;
use rayon::prelude::*;

use super::tree::{cart_fit, TreeNode, TreeParams, TreeTarget};
use super::{argmax_first, check_targets, check_width, ClassEncoding, Classifier, Matrix, Regressor};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, Label, ParamMap};
use crate::random::{derive_seed, rng_from};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub seed: u64,
    /// Train each tree on a bootstrap sample of size N.
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_leaf: 1,
            seed: 0,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<TreeNode>,
    pub seed: u64,
    pub n_features: usize,
}

impl ForestModel {
    pub fn predict_value(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_value(row)).sum::<f64>() / self.trees.len() as f64
    }

    /// Majority vote over per-tree classes; ties go to the lowest encoded
    /// class, which is the lexicographically smallest label.
    pub fn predict_class(&self, row: &[f64], n_classes: usize) -> usize {
        let mut votes = vec![0.0; n_classes];
        for t in &self.trees {
            votes[t.predict_class(row)] += 1.0;
        }
        argmax_first(&votes)
    }
}

/// Seed of tree `index` in a forest seeded with `seed`.
pub(crate) fn tree_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, index as u64)
}

/// Fits `n_trees` CART trees, each on a bootstrap sample with ⌈√D⌉
/// candidate features per node. Trees are trained in parallel; each has its
/// own derived seed so the result matches sequential training.
pub fn forest_fit(x: &Matrix, target: TreeTarget<'_>, params: &ForestParams) -> Result<ForestModel> {
    if params.n_trees == 0 {
        return Err(Error::InvalidParameter {
            name: "n_trees".into(),
            reason: "must be >= 1".into(),
        });
    }
    let n = x.n_rows();
    let d = x.n_cols();
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        feature_subset: Some((d as f64).sqrt().ceil() as usize),
    };
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|i| {
            let seed = tree_seed(params.seed, i);
            let rows: Vec<usize> = if params.bootstrap {
                let mut rng = rng_from(derive_seed(seed, u64::MAX));
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            cart_fit(x, &rows, target, &tree_params, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel {
        trees,
        seed: params.seed,
        n_features: d,
    })
}

fn params_map(p: &ForestParams) -> ParamMap {
    ParamMap::new()
        .with("bootstrap", p.bootstrap)
        .with("max_depth", p.max_depth.unwrap_or(0))
        .with("min_leaf", p.min_leaf)
        .with("n_trees", p.n_trees)
        .with("seed", p.seed)
}

fn apply_params(p: &ForestParams, updates: &ParamMap) -> Result<ForestParams> {
    let mut next = p.clone();
    for (name, value) in updates.iter() {
        match name {
            "bootstrap" => next.bootstrap = value.as_bool(name)?,
            "max_depth" => {
                let d = value.as_usize(name)?;
                next.max_depth = (d > 0).then_some(d);
            }
            "min_leaf" => next.min_leaf = value.as_usize(name)?.max(1),
            "n_trees" => {
                next.n_trees = value.as_usize(name)?;
                if next.n_trees == 0 {
                    return Err(Error::InvalidParameter {
                        name: name.into(),
                        reason: "must be >= 1".into(),
                    });
                }
            }
            "seed" => next.seed = value.as_u64(name)?,
            other => return Err(Error::UnknownParameter(other.to_string())),
        }
    }
    Ok(next)
}

#[derive(Debug, Clone, Default)]
pub struct RandomForestRegressor {
    params: ForestParams,
    model: Option<ForestModel>,
}

impl RandomForestRegressor {
    pub fn new(params: ForestParams) -> Self {
        Self { params, model: None }
    }

    pub fn model(&self) -> Option<&ForestModel> {
        self.model.as_ref()
    }
}

impl Estimator for RandomForestRegressor {
    fn name(&self) -> &'static str {
        "forest"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TabularRegressor
    }

    fn is_fitted(&self) -> bool {
        self.model.is_some()
    }

    fn get_params(&self) -> ParamMap {
        params_map(&self.params)
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        self.params = apply_params(&self.params, updates)?;
        self.model = None;
        Ok(())
    }
}

impl Regressor for RandomForestRegressor {
    fn fit(&mut self, x: &Matrix, y: &[f64]) -> Result<()> {
        self.model = Some(forest_fit(x, TreeTarget::Regression(y), &self.params)?);
        Ok(())
    }

    fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        let model = self.model.as_ref().ok_or(Error::NotFitted)?;
        check_width(model.n_features, x)?;
        Ok(x.rows().map(|r| model.predict_value(r)).collect())
    }

    fn clone_unfitted(&self) -> Box<dyn Regressor> {
        Box::new(Self::new(self.params.clone()))
    }
}

#[derive(Debug, Clone, Default)]
pub struct RandomForestClassifier {
    params: ForestParams,
    fitted: Option<(ForestModel, ClassEncoding)>,
}

impl RandomForestClassifier {
    pub fn new(params: ForestParams) -> Self {
        Self { params, fitted: None }
    }

    pub fn model(&self) -> Option<&ForestModel> {
        self.fitted.as_ref().map(|f| &f.0)
    }
}

impl Estimator for RandomForestClassifier {
    fn name(&self) -> &'static str {
        "forest"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TabularClassifier
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn get_params(&self) -> ParamMap {
        params_map(&self.params)
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        self.params = apply_params(&self.params, updates)?;
        self.fitted = None;
        Ok(())
    }
}

impl Classifier for RandomForestClassifier {
    fn fit(&mut self, x: &Matrix, y: &[Label]) -> Result<()> {
        check_targets(x, y.len())?;
        let encoding = ClassEncoding::fit(y);
        let classes = encoding.encode(y);
        let target = TreeTarget::Classification {
            classes: &classes,
            n_classes: encoding.classes.len(),
        };
        self.fitted = Some((forest_fit(x, target, &self.params)?, encoding));
        Ok(())
    }

    fn predict(&self, x: &Matrix) -> Result<Vec<Label>> {
        let (model, encoding) = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        check_width(model.n_features, x)?;
        Ok(x.rows()
            .map(|r| encoding.classes[model.predict_class(r, encoding.classes.len())].clone())
            .collect())
    }

    fn clone_unfitted(&self) -> Box<dyn Classifier> {
        Box::new(Self::new(self.params.clone()))
    }
}
