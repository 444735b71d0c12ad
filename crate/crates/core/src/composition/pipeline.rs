use std::fmt;

use crate::classification::{TimeSeriesClassifier, TimeSeriesRegressor};
use crate::data::Panel;
use crate::error::{Error, Result};
use crate::estimator::{prefix_error, Estimator, EstimatorKind, Label, ParamMap};
use crate::tabular::{Classifier, Regressor};
use crate::transformers::{Data, DataKind, Transformer};

/// Estimator at the end of a pipeline.
pub enum FinalEstimator {
    TabularClassifier(Box<dyn Classifier>),
    TabularRegressor(Box<dyn Regressor>),
    SeriesClassifier(Box<dyn TimeSeriesClassifier>),
    SeriesRegressor(Box<dyn TimeSeriesRegressor>),
}

impl FinalEstimator {
    fn estimator(&self) -> &dyn Estimator {
        match self {
            FinalEstimator::TabularClassifier(e) => e.as_ref(),
            FinalEstimator::TabularRegressor(e) => e.as_ref(),
            FinalEstimator::SeriesClassifier(e) => e.as_ref(),
            FinalEstimator::SeriesRegressor(e) => e.as_ref(),
        }
    }

    fn estimator_mut(&mut self) -> &mut dyn Estimator {
        match self {
            FinalEstimator::TabularClassifier(e) => e.as_mut(),
            FinalEstimator::TabularRegressor(e) => e.as_mut(),
            FinalEstimator::SeriesClassifier(e) => e.as_mut(),
            FinalEstimator::SeriesRegressor(e) => e.as_mut(),
        }
    }

    fn input_kind(&self) -> DataKind {
        match self {
            FinalEstimator::TabularClassifier(_) | FinalEstimator::TabularRegressor(_) => DataKind::Table,
            FinalEstimator::SeriesClassifier(_) | FinalEstimator::SeriesRegressor(_) => DataKind::Panel,
        }
    }

    fn is_classifier(&self) -> bool {
        matches!(
            self,
            FinalEstimator::TabularClassifier(_) | FinalEstimator::SeriesClassifier(_)
        )
    }

    fn clone_unfitted(&self) -> FinalEstimator {
        match self {
            FinalEstimator::TabularClassifier(e) => FinalEstimator::TabularClassifier(e.clone_unfitted()),
            FinalEstimator::TabularRegressor(e) => FinalEstimator::TabularRegressor(e.clone_unfitted()),
            FinalEstimator::SeriesClassifier(e) => FinalEstimator::SeriesClassifier(e.clone_unfitted()),
            FinalEstimator::SeriesRegressor(e) => FinalEstimator::SeriesRegressor(e.clone_unfitted()),
        }
    }

    fn fit(&mut self, data: &Data, targets: Targets<'_>) -> Result<()> {
        match (self, targets) {
            (FinalEstimator::TabularClassifier(e), Targets::Labels(y)) => e.fit(data.as_table()?, y),
            (FinalEstimator::TabularRegressor(e), Targets::Values(y)) => e.fit(data.as_table()?, y),
            (FinalEstimator::SeriesClassifier(e), Targets::Labels(y)) => e.fit(data.as_panel()?, y),
            (FinalEstimator::SeriesRegressor(e), Targets::Values(y)) => e.fit(data.as_panel()?, y),
            (fe, _) => Err(Error::IncompatibleStep {
                step: fe.estimator().name().into(),
                reason: "target type does not match the final estimator".into(),
            }),
        }
    }

    fn predict(&self, data: &Data) -> Result<Predictions> {
        Ok(match self {
            FinalEstimator::TabularClassifier(e) => Predictions::Labels(e.predict(data.as_table()?)?),
            FinalEstimator::TabularRegressor(e) => Predictions::Values(e.predict(data.as_table()?)?),
            FinalEstimator::SeriesClassifier(e) => Predictions::Labels(e.predict(data.as_panel()?)?),
            FinalEstimator::SeriesRegressor(e) => Predictions::Values(e.predict(data.as_panel()?)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Targets<'a> {
    Labels(&'a [Label]),
    Values(&'a [f64]),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predictions {
    Labels(Vec<Label>),
    Values(Vec<f64>),
}

/// Named transformer steps followed by a final estimator.
///
/// Parameters are exposed as `step__param` and `final__param`, where
/// `final` is the registered name of the final estimator.
pub struct Pipeline {
    steps: Vec<(String, Box<dyn Transformer>)>,
    last: FinalEstimator,
    fitted: bool,
}

impl fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let steps: Vec<&str> = self.steps.iter().map(|(n, _)| n.as_str()).collect();
        f.debug_struct("Pipeline")
            .field("steps", &steps)
            .field("final", &self.last.estimator().name())
            .field("fitted", &self.fitted)
            .finish()
    }
}

impl Pipeline {
    pub fn new(steps: Vec<(String, Box<dyn Transformer>)>, last: FinalEstimator) -> Result<Self> {
        let final_name = last.estimator().name();
        let mut seen = std::collections::BTreeSet::new();
        for name in steps.iter().map(|(n, _)| n.as_str()).chain([final_name]) {
            if name.is_empty() || name.contains("__") {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: "step names must be non-empty and free of `__`".into(),
                });
            }
            if !seen.insert(name) {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: "duplicate step name".into(),
                });
            }
        }
        Ok(Self {
            steps,
            last,
            fitted: false,
        })
    }

    pub fn step_names(&self) -> Vec<&str> {
        self.steps.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn final_estimator(&self) -> &FinalEstimator {
        &self.last
    }

    pub fn clone_unfitted(&self) -> Pipeline {
        Pipeline {
            steps: self
                .steps
                .iter()
                .map(|(n, t)| (n.clone(), t.clone_unfitted()))
                .collect(),
            last: self.last.clone_unfitted(),
            fitted: false,
        }
    }

    /// Checks that each step accepts what the previous one produces.
    fn check_kinds(&self, input: DataKind) -> Result<()> {
        let mut current = input;
        for (name, step) in &self.steps {
            if step.input_kind() != current {
                return Err(Error::IncompatibleStep {
                    step: name.clone(),
                    reason: format!("expects {:?} input, receives {current:?}", step.input_kind()),
                });
            }
            current = step.output_kind();
        }
        if self.last.input_kind() != current {
            return Err(Error::IncompatibleStep {
                step: self.last.estimator().name().into(),
                reason: format!("expects {:?} input, receives {current:?}", self.last.input_kind()),
            });
        }
        Ok(())
    }

    pub fn fit(&mut self, data: &Data, targets: Targets<'_>) -> Result<()> {
        self.fitted = false;
        self.check_kinds(data.kind())?;
        let mut current = data.clone();
        for (_, step) in self.steps.iter_mut() {
            current = step.fit_transform(&current)?;
        }
        self.last.fit(&current, targets)?;
        self.fitted = true;
        Ok(())
    }

    pub fn predict(&self, data: &Data) -> Result<Predictions> {
        if !self.fitted {
            return Err(Error::NotFitted);
        }
        self.check_kinds(data.kind())?;
        let mut current = data.clone();
        for (_, step) in &self.steps {
            current = step.transform(&current)?;
        }
        self.last.predict(&current)
    }
}

impl Estimator for Pipeline {
    fn name(&self) -> &'static str {
        "pipeline"
    }

    fn kind(&self) -> EstimatorKind {
        self.last.estimator().kind()
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn get_params(&self) -> ParamMap {
        let mut p = ParamMap::new();
        for (name, step) in &self.steps {
            p.extend_prefixed(name, step.get_params());
        }
        let last = self.last.estimator();
        p.extend_prefixed(last.name(), last.get_params());
        p
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let (own, nested) = updates.split_nested();
        if let Some((name, _)) = own.first() {
            return Err(Error::UnknownParameter(name.to_string()));
        }
        let mut next = self.clone_unfitted();
        for (component, params) in nested {
            let final_name = next.last.estimator().name();
            if component == final_name {
                next.last
                    .estimator_mut()
                    .set_params(&params)
                    .map_err(|e| prefix_error(&component, e))?;
            } else if let Some((_, step)) = next.steps.iter_mut().find(|(n, _)| *n == component) {
                step.set_params(&params).map_err(|e| prefix_error(&component, e))?;
            } else {
                let first = params.iter().next().map_or(String::new(), |(k, _)| k.to_string());
                return Err(Error::UnknownParameter(format!("{component}__{first}")));
            }
        }
        *self = next;
        Ok(())
    }
}

impl TimeSeriesClassifier for Pipeline {
    fn fit(&mut self, x: &Panel, y: &[Label]) -> Result<()> {
        if !self.last.is_classifier() {
            return Err(Error::IncompatibleStep {
                step: self.last.estimator().name().into(),
                reason: "final estimator is not a classifier".into(),
            });
        }
        Pipeline::fit(self, &Data::Panel(x.clone()), Targets::Labels(y))
    }

    fn predict(&self, x: &Panel) -> Result<Vec<Label>> {
        match Pipeline::predict(self, &Data::Panel(x.clone()))? {
            Predictions::Labels(l) => Ok(l),
            Predictions::Values(_) => unreachable!("classifier pipelines predict labels"),
        }
    }

    fn clone_unfitted(&self) -> Box<dyn TimeSeriesClassifier> {
        Box::new(Pipeline::clone_unfitted(self))
    }
}
