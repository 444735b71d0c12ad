//! Ordinary least squares via centered normal equations.
//!
//! A rank-deficient Gram matrix falls back to a tiny ridge penalty so the
//! solver always returns finite coefficients.

use super::{check_targets, check_width, Matrix, Regressor};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, ParamMap};

/// Ridge penalty added to the Gram diagonal when it is numerically singular.
pub const RIDGE_FALLBACK: f64 = 1e-8;

/// Relative pivot size below which the Gram matrix counts as singular.
const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl LinearModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(b, x)| b * x)
                .sum::<f64>()
    }
}

pub fn ols_fit(x: &Matrix, y: &[f64]) -> Result<LinearModel> {
    check_targets(x, y.len())?;
    let (n, d) = (x.n_rows(), x.n_cols());
    if n < d + 1 {
        return Err(Error::TooFewRows {
            needed: d + 1,
            actual: n,
        });
    }
    let nf = n as f64;
    let x_mean: Vec<f64> = (0..d)
        .map(|j| x.rows().map(|r| r[j]).sum::<f64>() / nf)
        .collect();
    let y_mean = y.iter().sum::<f64>() / nf;

    let mut gram = vec![0.0; d * d];
    let mut rhs = vec![0.0; d];
    let mut centered = vec![0.0; d];
    for (row, &target) in x.rows().zip(y) {
        for j in 0..d {
            centered[j] = row[j] - x_mean[j];
        }
        let yc = target - y_mean;
        for j in 0..d {
            rhs[j] += centered[j] * yc;
            for k in 0..=j {
                gram[j * d + k] += centered[j] * centered[k];
            }
        }
    }
    for j in 0..d {
        for k in 0..j {
            gram[k * d + j] = gram[j * d + k];
        }
    }

    let coefficients = match ldl_solve(&gram, &rhs, d) {
        Some(beta) => beta,
        None => {
            let mut lambda = RIDGE_FALLBACK;
            loop {
                let mut ridged = gram.clone();
                for j in 0..d {
                    ridged[j * d + j] += lambda;
                }
                if let Some(beta) = ldl_solve(&ridged, &rhs, d) {
                    break beta;
                }
                lambda *= 10.0;
                if !lambda.is_finite() {
                    return Err(Error::DegenerateFit);
                }
            }
        }
    };
    let intercept = y_mean
        - coefficients
            .iter()
            .zip(&x_mean)
            .map(|(b, m)| b * m)
            .sum::<f64>();
    Ok(LinearModel {
        intercept,
        coefficients,
    })
}

/// Solves `a x = b` for symmetric `a` by LDLᵀ factorization; `None` when a
/// pivot is not safely positive.
fn ldl_solve(a: &[f64], b: &[f64], d: usize) -> Option<Vec<f64>> {
    let scale = (0..d).map(|j| a[j * d + j].abs()).fold(0.0, f64::max);
    let tol = PIVOT_TOLERANCE * scale.max(f64::MIN_POSITIVE);
    let mut l = vec![0.0; d * d];
    let mut diag = vec![0.0; d];
    for j in 0..d {
        let mut dj = a[j * d + j];
        for k in 0..j {
            dj -= l[j * d + k] * l[j * d + k] * diag[k];
        }
        if dj.is_nan() || dj <= tol {
            return None;
        }
        diag[j] = dj;
        l[j * d + j] = 1.0;
        for i in j + 1..d {
            let mut v = a[i * d + j];
            for k in 0..j {
                v -= l[i * d + k] * l[j * d + k] * diag[k];
            }
            l[i * d + j] = v / dj;
        }
    }
    let mut z = b.to_vec();
    for i in 0..d {
        for k in 0..i {
            z[i] -= l[i * d + k] * z[k];
        }
    }
    for i in 0..d {
        z[i] /= diag[i];
    }
    for i in (0..d).rev() {
        for k in i + 1..d {
            z[i] -= l[k * d + i] * z[k];
        }
    }
    Some(z)
}

/// Least-squares linear regression with intercept.
#[derive(Debug, Clone, Default)]
pub struct LinearRegression {
    model: Option<LinearModel>,
}

impl LinearRegression {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn model(&self) -> Option<&LinearModel> {
        self.model.as_ref()
    }
}

impl Estimator for LinearRegression {
    fn name(&self) -> &'static str {
        "ols"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TabularRegressor
    }

    fn is_fitted(&self) -> bool {
        self.model.is_some()
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new()
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        if let Some((name, _)) = updates.iter().next() {
            return Err(Error::UnknownParameter(name.to_string()));
        }
        self.model = None;
        Ok(())
    }
}

impl Regressor for LinearRegression {
    fn fit(&mut self, x: &Matrix, y: &[f64]) -> Result<()> {
        self.model = Some(ols_fit(x, y)?);
        Ok(())
    }

    fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        let model = self.model.as_ref().ok_or(Error::NotFitted)?;
        check_width(model.coefficients.len(), x)?;
        Ok(x.rows().map(|r| model.predict_row(r)).collect())
    }

    fn clone_unfitted(&self) -> Box<dyn Regressor> {
        Box::new(LinearRegression::new())
    }
}
