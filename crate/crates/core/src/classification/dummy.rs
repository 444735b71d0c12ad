use super::{check_n_targets, TimeSeriesClassifier};
use crate::data::Panel;
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, Label, ParamMap};
use crate::tabular::majority_vote;

/// Baseline predicting the most frequent training label for every input.
#[derive(Debug, Clone, Default)]
pub struct MajorityClassifier {
    label: Option<Label>,
}

impl MajorityClassifier {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Estimator for MajorityClassifier {
    fn name(&self) -> &'static str {
        "majority"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TimeSeriesClassifier
    }

    fn is_fitted(&self) -> bool {
        self.label.is_some()
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new()
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        if let Some((name, _)) = updates.iter().next() {
            return Err(Error::UnknownParameter(name.to_string()));
        }
        self.label = None;
        Ok(())
    }
}

impl TimeSeriesClassifier for MajorityClassifier {
    fn fit(&mut self, x: &Panel, y: &[Label]) -> Result<()> {
        check_n_targets(x, y.len())?;
        self.label = majority_vote(y.iter().map(String::as_str));
        Ok(())
    }

    fn predict(&self, x: &Panel) -> Result<Vec<Label>> {
        let label = self.label.as_ref().ok_or(Error::NotFitted)?;
        Ok(vec![label.clone(); x.n_instances()])
    }

    fn clone_unfitted(&self) -> Box<dyn TimeSeriesClassifier> {
        Box::new(Self::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::TimeSeries;

    #[test]
    fn predicts_most_frequent() {
        let s = || TimeSeries::from_values(vec![0.0]).unwrap();
        let panel = Panel::from_series("x", vec![s(), s(), s()]).unwrap();
        let mut m = MajorityClassifier::new();
        assert_eq!(m.predict(&panel), Err(Error::NotFitted));
        m.fit(&panel, &["b".into(), "a".into(), "b".into()]).unwrap();
        assert_eq!(m.predict(&panel).unwrap(), vec!["b".to_string(); 3]);
    }
}
