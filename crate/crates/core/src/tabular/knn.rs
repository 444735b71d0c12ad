use super::{check_targets, check_width, majority_vote, Classifier, Matrix, Regressor};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, Label, ParamMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnnTask {
    Regress,
    Classify,
}

/// Training targets for [`knn_predict`].
#[derive(Debug, Clone, Copy)]
pub enum KnnTarget<'a> {
    Values(&'a [f64]),
    Labels(&'a [Label]),
}

#[derive(Debug, Clone, PartialEq)]
pub enum KnnPrediction {
    Value(f64),
    Label(Label),
}

/// Indices of the `k` rows closest to `query` in Euclidean distance.
/// Distance ties go to the lower row index.
pub fn nearest_neighbors(x_train: &Matrix, query: &[f64], k: usize) -> Result<Vec<usize>> {
    let n = x_train.n_rows();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    check_width(query.len(), x_train)?;
    let mut dists: Vec<(f64, usize)> = x_train
        .rows()
        .enumerate()
        .map(|(i, row)| {
            let d: f64 = row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
            (d, i)
        })
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(dists.into_iter().take(k).map(|(_, i)| i).collect())
}

pub fn knn_predict(
    x_train: &Matrix,
    target: KnnTarget<'_>,
    query: &[f64],
    k: usize,
) -> Result<KnnPrediction> {
    let n_targets = match target {
        KnnTarget::Values(v) => v.len(),
        KnnTarget::Labels(l) => l.len(),
    };
    check_targets(x_train, n_targets)?;
    let idx = nearest_neighbors(x_train, query, k)?;
    Ok(match target {
        KnnTarget::Values(v) => {
            KnnPrediction::Value(idx.iter().map(|&i| v[i]).sum::<f64>() / k as f64)
        }
        KnnTarget::Labels(l) => KnnPrediction::Label(
            majority_vote(idx.iter().map(|&i| l[i].as_str())).expect("k >= 1"),
        ),
    })
}

impl KnnTarget<'_> {
    pub fn task(&self) -> KnnTask {
        match self {
            KnnTarget::Values(_) => KnnTask::Regress,
            KnnTarget::Labels(_) => KnnTask::Classify,
        }
    }
}

fn set_k(k: &mut usize, updates: &ParamMap) -> Result<()> {
    let mut next = *k;
    for (name, value) in updates.iter() {
        match name {
            "k" => next = value.as_usize(name)?,
            other => return Err(Error::UnknownParameter(other.to_string())),
        }
    }
    if next == 0 {
        return Err(Error::InvalidParameter {
            name: "k".into(),
            reason: "must be >= 1".into(),
        });
    }
    *k = next;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct KnnRegressor {
    k: usize,
    fitted: Option<(Matrix, Vec<f64>)>,
}

impl KnnRegressor {
    pub fn new(k: usize) -> Self {
        Self { k, fitted: None }
    }
}

impl Estimator for KnnRegressor {
    fn name(&self) -> &'static str {
        "knn"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TabularRegressor
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new().with("k", self.k)
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        set_k(&mut self.k, updates)?;
        self.fitted = None;
        Ok(())
    }
}

impl Regressor for KnnRegressor {
    fn fit(&mut self, x: &Matrix, y: &[f64]) -> Result<()> {
        check_targets(x, y.len())?;
        if self.k > x.n_rows() {
            return Err(Error::InvalidK { k: self.k, n: x.n_rows() });
        }
        self.fitted = Some((x.clone(), y.to_vec()));
        Ok(())
    }

    fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        let (train, targets) = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        x.rows()
            .map(|q| match knn_predict(train, KnnTarget::Values(targets), q, self.k)? {
                KnnPrediction::Value(v) => Ok(v),
                KnnPrediction::Label(_) => unreachable!("value targets"),
            })
            .collect()
    }

    fn clone_unfitted(&self) -> Box<dyn Regressor> {
        Box::new(KnnRegressor::new(self.k))
    }
}

#[derive(Debug, Clone)]
pub struct KnnClassifier {
    k: usize,
    fitted: Option<(Matrix, Vec<Label>)>,
}

impl KnnClassifier {
    pub fn new(k: usize) -> Self {
        Self { k, fitted: None }
    }
}

impl Estimator for KnnClassifier {
    fn name(&self) -> &'static str {
        "knn"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TabularClassifier
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new().with("k", self.k)
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        set_k(&mut self.k, updates)?;
        self.fitted = None;
        Ok(())
    }
}

impl Classifier for KnnClassifier {
    fn fit(&mut self, x: &Matrix, y: &[Label]) -> Result<()> {
        check_targets(x, y.len())?;
        if self.k > x.n_rows() {
            return Err(Error::InvalidK { k: self.k, n: x.n_rows() });
        }
        self.fitted = Some((x.clone(), y.to_vec()));
        Ok(())
    }

    fn predict(&self, x: &Matrix) -> Result<Vec<Label>> {
        let (train, labels) = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        x.rows()
            .map(|q| match knn_predict(train, KnnTarget::Labels(labels), q, self.k)? {
                KnnPrediction::Label(l) => Ok(l),
                KnnPrediction::Value(_) => unreachable!("label targets"),
            })
            .collect()
    }

    fn clone_unfitted(&self) -> Box<dyn Classifier> {
        Box::new(KnnClassifier::new(self.k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn train() -> (Matrix, Vec<f64>, Vec<Label>) {
        let x = Matrix::from_rows(&[vec![0.], vec![1.], vec![3.], vec![10.]]).unwrap();
        let y = vec![1., 2., 3., 10.];
        let l = ["b", "a", "b", "c"].iter().map(|s| s.to_string()).collect();
        (x, y, l)
    }

    #[test]
    fn k1_returns_exact_match() {
        let (x, y, l) = train();
        assert_eq!(
            knn_predict(&x, KnnTarget::Values(&y), &[3.], 1).unwrap(),
            KnnPrediction::Value(3.)
        );
        assert_eq!(
            knn_predict(&x, KnnTarget::Labels(&l), &[10.], 1).unwrap(),
            KnnPrediction::Label("c".into())
        );
    }

    #[test]
    fn k_equals_n_is_global() {
        let (x, y, l) = train();
        assert_eq!(
            knn_predict(&x, KnnTarget::Values(&y), &[100.], 4).unwrap(),
            KnnPrediction::Value(4.)
        );
        assert_eq!(
            knn_predict(&x, KnnTarget::Labels(&l), &[100.], 4).unwrap(),
            KnnPrediction::Label("b".into())
        );
    }

    #[test]
    fn distance_ties_prefer_lower_row() {
        let (x, y, _) = train();
        // 0.5 is equidistant from rows 0 and 1
        assert_eq!(
            knn_predict(&x, KnnTarget::Values(&y), &[0.5], 1).unwrap(),
            KnnPrediction::Value(1.)
        );
    }

    #[test]
    fn invalid_k() {
        let (x, y, _) = train();
        assert_eq!(
            knn_predict(&x, KnnTarget::Values(&y), &[0.], 0),
            Err(Error::InvalidK { k: 0, n: 4 })
        );
        assert_eq!(
            knn_predict(&x, KnnTarget::Values(&y), &[0.], 5),
            Err(Error::InvalidK { k: 5, n: 4 })
        );
    }

    #[test]
    fn k1_has_zero_training_error_on_distinct_rows() {
        let (x, _, l) = train();
        let mut clf = KnnClassifier::new(1);
        clf.fit(&x, &l).unwrap();
        assert_eq!(clf.predict(&x).unwrap(), l);
    }
}
