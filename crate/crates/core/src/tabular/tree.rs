//! CART decision trees.
//!
//! Splits are chosen greedily: variance reduction for regression, entropy
//! gain for classification. Candidate thresholds are midpoints between
//! adjacent distinct feature values. Ties go to the lower feature index and
//! then the smaller threshold. An impure node is split even when the best
//! gain is zero, so XOR-like structure is reachable with enough depth.
//!
//! Each node draws its feature subset from its own seed, derived from the
//! parent seed, so a shallower tree is always a prefix of a deeper one.

use rand::seq::index::sample;

use super::{argmax_first, check_targets, check_width, ClassEncoding, Classifier, Matrix, Regressor};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, Label, ParamMap};
use crate::random::{derive_seed, rng_from};

#[derive(Debug, Clone, PartialEq)]
pub enum LeafValue {
    Value(f64),
    /// Class probabilities indexed by encoded class.
    Distribution(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf(LeafValue),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn leaf_for(&self, row: &[f64]) -> &LeafValue {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf(v) => return v,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict_value(&self, row: &[f64]) -> f64 {
        match self.leaf_for(row) {
            LeafValue::Value(v) => *v,
            LeafValue::Distribution(p) => argmax_first(p) as f64,
        }
    }

    /// Encoded class with the highest leaf probability.
    pub fn predict_class(&self, row: &[f64]) -> usize {
        match self.leaf_for(row) {
            LeafValue::Distribution(p) => argmax_first(p),
            LeafValue::Value(v) => *v as usize,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum TreeTarget<'a> {
    Regression(&'a [f64]),
    Classification { classes: &'a [usize], n_classes: usize },
}

impl TreeTarget<'_> {
    fn len(&self) -> usize {
        match self {
            TreeTarget::Regression(y) => y.len(),
            TreeTarget::Classification { classes, .. } => classes.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Number of candidate features drawn per node; `None` uses all.
    pub feature_subset: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_leaf: 1,
            feature_subset: None,
        }
    }
}

/// Grows a tree on the given training rows (duplicates allowed).
pub fn cart_fit(
    x: &Matrix,
    rows: &[usize],
    target: TreeTarget<'_>,
    params: &TreeParams,
    seed: u64,
) -> Result<TreeNode> {
    check_targets(x, target.len())?;
    let min_leaf = params.min_leaf.max(1);
    if rows.len() < 2 * min_leaf {
        return Err(Error::TooFewRows {
            needed: 2 * min_leaf,
            actual: rows.len(),
        });
    }
    if let Some(&bad) = rows.iter().find(|&&r| r >= x.n_rows()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: x.n_rows(),
        });
    }
    let builder = Builder {
        x,
        target,
        max_depth: params.max_depth,
        min_leaf,
        feature_subset: params.feature_subset.filter(|&m| m >= 1 && m < x.n_cols()),
    };
    let mut rows = rows.to_vec();
    Ok(builder.grow(&mut rows, 0, seed))
}

struct Builder<'a> {
    x: &'a Matrix,
    target: TreeTarget<'a>,
    max_depth: Option<usize>,
    min_leaf: usize,
    feature_subset: Option<usize>,
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_> {
    fn grow(&self, rows: &mut [usize], depth: usize, seed: u64) -> TreeNode {
        let leaf = self.leaf_value(rows);
        let depth_reached = self.max_depth.is_some_and(|d| depth >= d);
        if depth_reached || self.is_pure(rows) || rows.len() < 2 * self.min_leaf {
            return TreeNode::Leaf(leaf);
        }
        let features: Vec<usize> = match self.feature_subset {
            Some(m) => {
                let mut rng = rng_from(seed);
                let mut f = sample(&mut rng, self.x.n_cols(), m).into_vec();
                f.sort_unstable();
                f
            }
            None => (0..self.x.n_cols()).collect(),
        };
        let mut best: Option<BestSplit> = None;
        for &feature in &features {
            if let Some(split) = self.best_split_on(rows, feature) {
                if best.as_ref().is_none_or(|b| split.gain > b.gain) {
                    best = Some(split);
                }
            }
        }
        let Some(best) = best else {
            return TreeNode::Leaf(leaf);
        };
        let (mut left, mut right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.x.get(r, best.feature) <= best.threshold);
        TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(self.grow(&mut left, depth + 1, derive_seed(seed, 1))),
            right: Box::new(self.grow(&mut right, depth + 1, derive_seed(seed, 2))),
        }
    }

    fn leaf_value(&self, rows: &[usize]) -> LeafValue {
        match self.target {
            TreeTarget::Regression(y) => {
                LeafValue::Value(rows.iter().map(|&r| y[r]).sum::<f64>() / rows.len() as f64)
            }
            TreeTarget::Classification { classes, n_classes } => {
                let mut counts = vec![0.0; n_classes];
                for &r in rows {
                    counts[classes[r]] += 1.0;
                }
                let n = rows.len() as f64;
                LeafValue::Distribution(counts.into_iter().map(|c| c / n).collect())
            }
        }
    }

    fn is_pure(&self, rows: &[usize]) -> bool {
        match self.target {
            TreeTarget::Regression(y) => rows.iter().all(|&r| y[r] == y[rows[0]]),
            TreeTarget::Classification { classes, .. } => {
                rows.iter().all(|&r| classes[r] == classes[rows[0]])
            }
        }
    }

    fn best_split_on(&self, rows: &[usize], feature: usize) -> Option<BestSplit> {
        let mut order: Vec<usize> = rows.to_vec();
        order.sort_by(|&a, &b| self.x.get(a, feature).total_cmp(&self.x.get(b, feature)));
        let values: Vec<f64> = order.iter().map(|&r| self.x.get(r, feature)).collect();
        let n = order.len();
        let mut best: Option<BestSplit> = None;
        let mut consider = |pos: usize, gain: f64| {
            // split between pos-1 and pos
            let (lo, hi) = (values[pos - 1], values[pos]);
            if lo == hi {
                return;
            }
            let mut threshold = lo + (hi - lo) / 2.0;
            if threshold >= hi {
                threshold = lo;
            }
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(BestSplit {
                    gain,
                    feature,
                    threshold,
                });
            }
        };
        let lo_pos = self.min_leaf;
        let hi_pos = n - self.min_leaf;
        match self.target {
            TreeTarget::Regression(y) => {
                let total: f64 = order.iter().map(|&r| y[r]).sum();
                let total_sq: f64 = order.iter().map(|&r| y[r] * y[r]).sum();
                let parent_sse = total_sq - total * total / n as f64;
                let (mut s, mut sq) = (0.0, 0.0);
                for pos in 1..n {
                    let v = y[order[pos - 1]];
                    s += v;
                    sq += v * v;
                    if pos < lo_pos || pos > hi_pos {
                        continue;
                    }
                    let nl = pos as f64;
                    let nr = (n - pos) as f64;
                    let left_sse = sq - s * s / nl;
                    let right_sse = (total_sq - sq) - (total - s) * (total - s) / nr;
                    consider(pos, parent_sse - left_sse - right_sse);
                }
            }
            TreeTarget::Classification { classes, n_classes } => {
                let mut right = vec![0usize; n_classes];
                for &r in &order {
                    right[classes[r]] += 1;
                }
                let parent = entropy(&right, n);
                let mut left = vec![0usize; n_classes];
                for pos in 1..n {
                    let c = classes[order[pos - 1]];
                    left[c] += 1;
                    right[c] -= 1;
                    if pos < lo_pos || pos > hi_pos {
                        continue;
                    }
                    let child = (pos as f64 * entropy(&left, pos)
                        + (n - pos) as f64 * entropy(&right, n - pos))
                        / n as f64;
                    consider(pos, parent - child);
                }
            }
        }
        best
    }
}

fn entropy(counts: &[usize], n: usize) -> f64 {
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn tree_params_from(max_depth: usize, min_leaf: usize, max_features: usize) -> TreeParams {
    TreeParams {
        max_depth: (max_depth > 0).then_some(max_depth),
        min_leaf,
        feature_subset: (max_features > 0).then_some(max_features),
    }
}

/// Hyper-parameters shared by the tree estimators. `max_depth = 0` and
/// `max_features = 0` mean unlimited.
#[derive(Debug, Clone, PartialEq)]
struct TreeConfig {
    max_depth: usize,
    min_leaf: usize,
    max_features: usize,
    seed: u64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: 0,
            min_leaf: 1,
            max_features: 0,
            seed: 0,
        }
    }
}

impl TreeConfig {
    fn params(&self) -> ParamMap {
        ParamMap::new()
            .with("max_depth", self.max_depth)
            .with("max_features", self.max_features)
            .with("min_leaf", self.min_leaf)
            .with("seed", self.seed)
    }

    fn apply(&self, updates: &ParamMap) -> Result<TreeConfig> {
        let mut next = self.clone();
        for (name, value) in updates.iter() {
            match name {
                "max_depth" => next.max_depth = value.as_usize(name)?,
                "max_features" => next.max_features = value.as_usize(name)?,
                "min_leaf" => next.min_leaf = value.as_usize(name)?.max(1),
                "seed" => next.seed = value.as_u64(name)?,
                other => return Err(Error::UnknownParameter(other.to_string())),
            }
        }
        Ok(next)
    }

    fn tree_params(&self) -> TreeParams {
        tree_params_from(self.max_depth, self.min_leaf, self.max_features)
    }
}

#[derive(Debug, Clone, Default)]
pub struct DecisionTreeRegressor {
    config: TreeConfig,
    tree: Option<(TreeNode, usize)>,
}

impl DecisionTreeRegressor {
    pub fn new(max_depth: Option<usize>, min_leaf: usize) -> Self {
        Self {
            config: TreeConfig {
                max_depth: max_depth.unwrap_or(0),
                min_leaf: min_leaf.max(1),
                ..TreeConfig::default()
            },
            tree: None,
        }
    }

    pub fn tree(&self) -> Option<&TreeNode> {
        self.tree.as_ref().map(|t| &t.0)
    }
}

impl Estimator for DecisionTreeRegressor {
    fn name(&self) -> &'static str {
        "tree"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TabularRegressor
    }

    fn is_fitted(&self) -> bool {
        self.tree.is_some()
    }

    fn get_params(&self) -> ParamMap {
        self.config.params()
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        self.config = self.config.apply(updates)?;
        self.tree = None;
        Ok(())
    }
}

impl Regressor for DecisionTreeRegressor {
    fn fit(&mut self, x: &Matrix, y: &[f64]) -> Result<()> {
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        let tree = cart_fit(
            x,
            &rows,
            TreeTarget::Regression(y),
            &self.config.tree_params(),
            self.config.seed,
        )?;
        self.tree = Some((tree, x.n_cols()));
        Ok(())
    }

    fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        let (tree, width) = self.tree.as_ref().ok_or(Error::NotFitted)?;
        check_width(*width, x)?;
        Ok(x.rows().map(|r| tree.predict_value(r)).collect())
    }

    fn clone_unfitted(&self) -> Box<dyn Regressor> {
        Box::new(Self {
            config: self.config.clone(),
            tree: None,
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct DecisionTreeClassifier {
    config: TreeConfig,
    fitted: Option<(TreeNode, ClassEncoding, usize)>,
}

impl DecisionTreeClassifier {
    pub fn new(max_depth: Option<usize>, min_leaf: usize) -> Self {
        Self {
            config: TreeConfig {
                max_depth: max_depth.unwrap_or(0),
                min_leaf: min_leaf.max(1),
                ..TreeConfig::default()
            },
            fitted: None,
        }
    }

    pub fn tree(&self) -> Option<&TreeNode> {
        self.fitted.as_ref().map(|t| &t.0)
    }
}

impl Estimator for DecisionTreeClassifier {
    fn name(&self) -> &'static str {
        "tree"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TabularClassifier
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

impl Classifier for DecisionTreeClassifier {
    fn fit(&mut self, x: &Matrix, y: &[Label]) -> Result<()> {
        check_targets(x, y.len())?;
        let encoding = ClassEncoding::fit(y);
        let classes = encoding.encode(y);
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        let tree = cart_fit(
            x,
            &rows,
            TreeTarget::Classification {
                classes: &classes,
                n_classes: encoding.classes.len(),
            },
            &self.config.tree_params(),
            self.config.seed,
        )?;
        self.fitted = Some((tree, encoding, x.n_cols()));
        Ok(())
    }

    fn predict(&self, x: &Matrix) -> Result<Vec<Label>> {
        let (tree, encoding, width) = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        check_width(*width, x)?;
        Ok(x.rows()
            .map(|r| encoding.classes[tree.predict_class(r)].clone())
            .collect())
    }

    fn clone_unfitted(&self) -> Box<dyn Classifier> {
        Box::new(Self {
            config: self.config.clone(),
            fitted: None,
        })
    }
}
