use super::{series_at, Forecaster, TrainingFrame};
use crate::data::TimeSeries;
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, ForecastingHorizon, ParamMap};

/// Relative size of an R diagonal entry below which the design matrix is
/// treated as rank deficient.
const RANK_TOLERANCE: f64 = 1e-10;

/// Least-squares polynomial coefficients (ascending powers) of `values`
/// against positions 0…T−1. Degree 0 returns the plain mean.
pub fn polyfit(values: &[f64], degree: usize) -> Result<Vec<f64>> {
    let t = values.len();
    let p = degree + 1;
    if t < p {
        return Err(Error::SeriesTooShort {
            needed: p,
            actual: t,
        });
    }
    if degree == 0 {
        return Ok(vec![values.iter().sum::<f64>() / t as f64]);
    }

    // column-major Vandermonde, reduced in place by Householder reflections
    let mut a: Vec<Vec<f64>> = (0..p)
        .map(|k| (0..t).map(|i| (i as f64).powi(k as i32)).collect())
        .collect();
    let mut b = values.to_vec();
    let mut scale: f64 = 0.0;
    for col in &a {
        scale = scale.max(col.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    for k in 0..p {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= RANK_TOLERANCE * scale {
            return Err(Error::DegenerateFit);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let reflect = |col: &mut [f64], v: &[f64]| {
            let dot: f64 = col.iter().zip(v).map(|(c, w)| c * w).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, w) in col.iter_mut().zip(v) {
                *c -= f * w;
            }
        };
        for col in a.iter_mut().skip(k) {
            reflect(&mut col[k..], &v);
        }
        reflect(&mut b[k..], &v);
    }
    let mut coefs = vec![0.0; p];
    for k in (0..p).rev() {
        let mut s = b[k];
        for j in k + 1..p {
            s -= a[j][k] * coefs[j];
        }
        coefs[k] = s / a[k][k];
    }
    Ok(coefs)
}

/// Evaluates ascending-power coefficients at `x` by Horner's rule.
pub fn polyval(coefs: &[f64], x: f64) -> f64 {
    coefs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn poly_trend_forecast(
    y: &TimeSeries,
    fh: &ForecastingHorizon,
    degree: usize,
) -> Result<TimeSeries> {
    let coefs = polyfit(y.values(), degree)?;
    let frame = TrainingFrame::of(y)?;
    let (_, absolute) = frame.resolve(fh)?;
    let values = absolute
        .iter()
        .map(|&t| polyval(&coefs, frame.offset(t)))
        .collect();
    series_at(absolute, values)
}

#[derive(Debug, Clone)]
pub struct PolynomialTrendForecaster {
    degree: usize,
    fitted: Option<(Vec<f64>, TrainingFrame)>,
}

impl PolynomialTrendForecaster {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            fitted: None,
        }
    }

    pub fn coefficients(&self) -> Option<&[f64]> {
        self.fitted.as_ref().map(|f| f.0.as_slice())
    }

    fn fitted(&self) -> Result<&(Vec<f64>, TrainingFrame)> {
        self.fitted.as_ref().ok_or(Error::NotFitted)
    }
}

impl Estimator for PolynomialTrendForecaster {
    fn name(&self) -> &'static str {
        "poly"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Forecaster
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new().with("degree", self.degree)
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let mut degree = self.degree;
        for (name, value) in updates.iter() {
            match name {
                "degree" => degree = value.as_usize(name)?,
                other => return Err(Error::UnknownParameter(other.to_string())),
            }
        }
        *self = Self::new(degree);
        Ok(())
    }
}

impl Forecaster for PolynomialTrendForecaster {
    fn fit(&mut self, y: &TimeSeries, _fh: Option<&ForecastingHorizon>) -> Result<()> {
        let coefs = polyfit(y.values(), self.degree)?;
        self.fitted = Some((coefs, TrainingFrame::of(y)?));
        Ok(())
    }

    fn predict(&self, fh: &ForecastingHorizon) -> Result<TimeSeries> {
        let (coefs, frame) = self.fitted()?;
        let (_, absolute) = frame.resolve(fh)?;
        let values = absolute
            .iter()
            .map(|&t| polyval(coefs, frame.offset(t)))
            .collect();
        series_at(absolute, values)
    }

    fn predict_in_sample(&self, times: &[i64]) -> Result<TimeSeries> {
        let (coefs, frame) = self.fitted()?;
        let values = frame
            .positions(times)?
            .into_iter()
            .map(|p| polyval(coefs, p as f64))
            .collect();
        series_at(times.to_vec(), values)
    }

    fn cutoff(&self) -> Option<i64> {
        self.fitted.as_ref().map(|f| f.1.cutoff())
    }

    fn clone_unfitted(&self) -> Box<dyn Forecaster> {
        Box::new(Self::new(self.degree))
    }
}
