use super::{Data, DataKind, Transformer};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, ParamMap};
use crate::tabular::Matrix;

/// Tabular transformer centering each column and scaling it to unit
/// population standard deviation. Constant columns are only centered.
#[derive(Debug, Clone, Default)]
pub struct StandardScaler {
    moments: Option<Vec<(f64, f64)>>,
}

impl StandardScaler {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Estimator for StandardScaler {
    fn name(&self) -> &'static str {
        "scaler"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Transformer
    }

    fn is_fitted(&self) -> bool {
        self.moments.is_some()
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new()
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        if let Some((name, _)) = updates.iter().next() {
            return Err(Error::UnknownParameter(name.to_string()));
        }
        self.moments = None;
        Ok(())
    }
}

impl Transformer for StandardScaler {
    fn input_kind(&self) -> DataKind {
        DataKind::Table
    }

    fn output_kind(&self) -> DataKind {
        DataKind::Table
    }

    fn fit(&mut self, data: &Data) -> Result<()> {
        let x = data.as_table()?;
        let n = x.n_rows() as f64;
        let moments = (0..x.n_cols())
            .map(|j| {
                let mean = x.rows().map(|r| r[j]).sum::<f64>() / n;
                let var = x.rows().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
                let sd = var.sqrt();
                (mean, if sd > 0.0 { sd } else { 1.0 })
            })
            .collect();
        self.moments = Some(moments);
        Ok(())
    }

    fn transform(&self, data: &Data) -> Result<Data> {
        let moments = self.moments.as_ref().ok_or(Error::NotFitted)?;
        let x = data.as_table()?;
        crate::tabular::check_width(moments.len(), x)?;
        let scaled = x
            .rows()
            .flat_map(|r| r.iter().zip(moments).map(|(v, (m, s))| (v - m) / s))
            .collect();
        Ok(Data::Table(Matrix::new(x.n_rows(), x.n_cols(), scaled)?))
    }

    fn clone_unfitted(&self) -> Box<dyn Transformer> {
        Box::new(Self::new())
    }
}
