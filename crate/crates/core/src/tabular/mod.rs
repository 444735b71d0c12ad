//! Tabular supervised learners used as reduction targets and ensemble
//! members.

mod forest;
mod knn;
mod linear;
mod tree;

use std::collections::BTreeMap;

pub use forest::{forest_fit, ForestModel, ForestParams, RandomForestClassifier, RandomForestRegressor};
pub use knn::{knn_predict, nearest_neighbors, KnnClassifier, KnnPrediction, KnnRegressor, KnnTarget, KnnTask};
pub use linear::{ols_fit, LinearModel, LinearRegression, RIDGE_FALLBACK};
pub use tree::{
    cart_fit, DecisionTreeClassifier, DecisionTreeRegressor, LeafValue, TreeNode, TreeParams,
    TreeTarget,
};

use crate::error::{Error, Result};
use crate::estimator::{Estimator, Label};

/// Dense row-major matrix of finite reals with at least one row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput(format!("matrix shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::LengthMismatch {
                expected: d,
                actual: bad.len(),
            });
        }
        Self::new(n, d, rows.concat())
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.rows) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.rows,
            });
        }
        let data = rows.iter().flat_map(|&r| self.row(r).iter().copied()).collect();
        Matrix::new(rows.len(), self.cols, data)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

pub trait Regressor: Estimator {
    fn fit(&mut self, x: &Matrix, y: &[f64]) -> Result<()>;

    fn predict(&self, x: &Matrix) -> Result<Vec<f64>>;

    fn clone_unfitted(&self) -> Box<dyn Regressor>;
}

pub trait Classifier: Estimator {
    fn fit(&mut self, x: &Matrix, y: &[Label]) -> Result<()>;

    fn predict(&self, x: &Matrix) -> Result<Vec<Label>>;

    fn clone_unfitted(&self) -> Box<dyn Classifier>;
}

/// Default-configured regressor by registered name.
pub fn regressor_from_name(name: &str) -> Result<Box<dyn Regressor>> {
    Ok(match name {
        "ols" => Box::new(LinearRegression::new()),
        "knn" => Box::new(KnnRegressor::new(5)),
        "tree" => Box::new(DecisionTreeRegressor::default()),
        "forest" => Box::new(RandomForestRegressor::default()),
        other => return Err(Error::Config(format!("unknown regressor `{other}`"))),
    })
}

/// Default-configured classifier by registered name.
pub fn classifier_from_name(name: &str) -> Result<Box<dyn Classifier>> {
    Ok(match name {
        "knn" => Box::new(KnnClassifier::new(1)),
        "tree" => Box::new(DecisionTreeClassifier::default()),
        "forest" => Box::new(RandomForestClassifier::default()),
        other => return Err(Error::Config(format!("unknown classifier `{other}`"))),
    })
}

pub(crate) fn check_targets(x: &Matrix, n_targets: usize) -> Result<()> {
    if x.n_rows() != n_targets {
        return Err(Error::LengthMismatch {
            expected: x.n_rows(),
            actual: n_targets,
        });
    }
    Ok(())
}

pub(crate) fn check_width(expected: usize, x: &Matrix) -> Result<()> {
    if x.n_cols() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: x.n_cols(),
        });
    }
    Ok(())
}

/// Sorted distinct labels and each input label's position among them.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassEncoding {
    pub classes: Vec<Label>,
}

impl ClassEncoding {
    pub fn fit(labels: &[Label]) -> Self {
        let mut classes: Vec<Label> = labels.to_vec();
        classes.sort();
        classes.dedup();
        Self { classes }
    }

    pub fn encode(&self, labels: &[Label]) -> Vec<usize> {
        labels
            .iter()
            .map(|l| self.classes.binary_search(l).expect("label seen at fit"))
            .collect()
    }
}

/// Most frequent label; ties go to the lexicographically smallest label.
pub fn majority_vote<'a, I>(labels: I) -> Option<Label>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    // BTreeMap iterates in label order and max_by keeps the last maximum,
    // so iterate in reverse to keep the smallest label on ties.
    counts
        .into_iter()
        .rev()
        .max_by_key(|(_, c)| *c)
        .map(|(l, _)| l.to_string())
}

/// Index of the largest count; ties go to the lowest index.
pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
