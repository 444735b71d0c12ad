use crate::error::{Error, Result};
use crate::estimator::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Smape,
    Mase,
    Rmse,
    Accuracy,
    /// 1 − accuracy.
    ErrorRate,
}

impl Metric {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "smape" => Metric::Smape,
            "mase" => Metric::Mase,
            "rmse" => Metric::Rmse,
            "accuracy" => Metric::Accuracy,
            "error" | "error_rate" => Metric::ErrorRate,
            other => return Err(Error::Config(format!("unknown metric `{other}`"))),
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Smape => "smape",
            Metric::Mase => "mase",
            Metric::Rmse => "rmse",
            Metric::Accuracy => "accuracy",
            Metric::ErrorRate => "error",
        }
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, Metric::Accuracy | Metric::ErrorRate)
    }

    /// The value as a loss, so lower is always better.
    pub fn as_loss(&self, value: f64) -> f64 {
        match self {
            Metric::Accuracy => 1.0 - value,
            _ => value,
        }
    }

    /// Scores a forecast. `train` is only used by MASE.
    pub fn score_forecast(&self, truth: &[f64], predicted: &[f64], train: &[f64]) -> Result<f64> {
        match self {
            Metric::Smape => smape(truth, predicted),
            Metric::Mase => mase(truth, predicted, train),
            Metric::Rmse => rmse(truth, predicted),
            Metric::Accuracy | Metric::ErrorRate => Err(Error::Config(format!(
                "`{}` is a classification metric",
                self.as_str()
            ))),
        }
    }

    pub fn score_labels(&self, truth: &[Label], predicted: &[Label]) -> Result<f64> {
        match self {
            Metric::Accuracy => accuracy(truth, predicted),
            Metric::ErrorRate => accuracy(truth, predicted).map(|a| 1.0 - a),
            _ => Err(Error::Config(format!("`{}` is a forecasting metric", self.as_str()))),
        }
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch {
            expected: a,
            actual: b,
        });
    }
    if a == 0 {
        return Err(Error::EmptyInput("no values to score".into()));
    }
    Ok(())
}

/// Symmetric MAPE on the 0–200 scale; terms with |y| + |ŷ| = 0 count as 0.
pub fn smape(truth: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(truth.len(), predicted.len())?;
    let sum: f64 = truth
        .iter()
        .zip(predicted)
        .map(|(y, p)| {
            let denom = y.abs() + p.abs();
            if denom == 0.0 {
                0.0
            } else {
                (y - p).abs() / denom
            }
        })
        .sum();
    Ok(200.0 * sum / truth.len() as f64)
}

/// Mean absolute error scaled by the in-sample one-step naive error of
/// `train`.
pub fn mase(truth: &[f64], predicted: &[f64], train: &[f64]) -> Result<f64> {
    check_lengths(truth.len(), predicted.len())?;
    if train.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            actual: train.len(),
        });
    }
    let scale = train.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (train.len() - 1) as f64;
    if scale == 0.0 {
        return Err(Error::ZeroDenominator("training series is constant".into()));
    }
    let mae = truth.iter().zip(predicted).map(|(y, p)| (y - p).abs()).sum::<f64>() / truth.len() as f64;
    Ok(mae / scale)
}

pub fn rmse(truth: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(truth.len(), predicted.len())?;
    let mse = truth.iter().zip(predicted).map(|(y, p)| (y - p).powi(2)).sum::<f64>() / truth.len() as f64;
    Ok(mse.sqrt())
}

pub fn accuracy(truth: &[Label], predicted: &[Label]) -> Result<f64> {
    check_lengths(truth.len(), predicted.len())?;
    let hits = truth.iter().zip(predicted).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}
