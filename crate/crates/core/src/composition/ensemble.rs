use std::collections::BTreeMap;
use std::fmt;

use crate::classification::TimeSeriesClassifier;
use crate::data::{Cell, ColumnKind, Panel, TimeIndex, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::{prefix_error, Estimator, EstimatorKind, Label, ParamMap};
use crate::tabular::majority_vote;
use crate::transformers::{Data, DataKind, Transformer};

/// One classifier per series column; predictions are a majority vote across
/// columns with ties going to the smallest label.
pub struct ColumnEnsembleClassifier {
    assignments: BTreeMap<String, Box<dyn TimeSeriesClassifier>>,
    fitted: bool,
}

impl fmt::Debug for ColumnEnsembleClassifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: BTreeMap<&str, &str> = self
            .assignments
            .iter()
            .map(|(c, e)| (c.as_str(), e.name()))
            .collect();
        f.debug_struct("ColumnEnsembleClassifier")
            .field("assignments", &names)
            .field("fitted", &self.fitted)
            .finish()
    }
}

impl ColumnEnsembleClassifier {
    pub fn new(assignments: Vec<(String, Box<dyn TimeSeriesClassifier>)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (column, clf) in assignments {
            if map.insert(column.clone(), clf).is_some() {
                return Err(Error::DuplicateColumnName(column));
            }
        }
        if map.is_empty() {
            return Err(Error::EmptyInput("no column assignments".into()));
        }
        Ok(Self {
            assignments: map,
            fitted: false,
        })
    }

    fn unfitted_copy(&self) -> Self {
        Self {
            assignments: self
                .assignments
                .iter()
                .map(|(c, e)| (c.clone(), e.clone_unfitted()))
                .collect(),
            fitted: false,
        }
    }

    /// Checks every series column is assigned and every assignment names a
    /// series column with equal-length series.
    fn check_columns(&self, x: &Panel) -> Result<()> {
        for name in x.series_column_names() {
            if !self.assignments.contains_key(name) {
                return Err(Error::UnassignedColumn(name.to_string()));
            }
        }
        for column in self.assignments.keys() {
            if x.column_kind(column)? != ColumnKind::Series {
                return Err(Error::NotASeriesColumn(column.clone()));
            }
            let series = x.series_column(column)?;
            let len = series[0].len();
            if let Some(bad) = series.iter().find(|s| s.len() != len) {
                return Err(Error::LengthMismatch {
                    expected: len,
                    actual: bad.len(),
                });
            }
        }
        Ok(())
    }
}

impl Estimator for ColumnEnsembleClassifier {
    fn name(&self) -> &'static str {
        "column_ensemble"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::TimeSeriesClassifier
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn get_params(&self) -> ParamMap {
        let mut p = ParamMap::new();
        for (column, clf) in &self.assignments {
            p.extend_prefixed(column, clf.get_params());
        }
        p
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let (own, nested) = updates.split_nested();
        if let Some((name, _)) = own.first() {
            return Err(Error::UnknownParameter(name.to_string()));
        }
        let mut next = self.unfitted_copy();
        for (column, params) in nested {
            let clf = next.assignments.get_mut(&column).ok_or_else(|| {
                let first = params.iter().next().map_or(String::new(), |(k, _)| k.to_string());
                Error::UnknownParameter(format!("{column}__{first}"))
            })?;
            clf.set_params(&params).map_err(|e| prefix_error(&column, e))?;
        }
        *self = next;
        Ok(())
    }
}

impl TimeSeriesClassifier for ColumnEnsembleClassifier {
    fn fit(&mut self, x: &Panel, y: &[Label]) -> Result<()> {
        self.fitted = false;
        self.check_columns(x)?;
        for (column, clf) in self.assignments.iter_mut() {
            clf.fit(&x.select_columns(&[column])?, y)?;
        }
        self.fitted = true;
        Ok(())
    }

    fn predict(&self, x: &Panel) -> Result<Vec<Label>> {
        if !self.fitted {
            return Err(Error::NotFitted);
        }
        self.check_columns(x)?;
        let per_column = self
            .assignments
            .iter()
            .map(|(column, clf)| clf.predict(&x.select_columns(&[column])?))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..x.n_instances())
            .map(|i| majority_vote(per_column.iter().map(|p| p[i].as_str())).expect("non-empty ensemble"))
            .collect())
    }

    fn clone_unfitted(&self) -> Box<dyn TimeSeriesClassifier> {
        Box::new(self.unfitted_copy())
    }
}

/// Per instance, joins the listed series columns end to end into a single
/// series column `name`, re-indexed from 0.
pub fn column_concatenate(panel: &Panel, columns: &[&str], name: &str) -> Result<Panel> {
    if columns.is_empty() {
        return Err(Error::EmptyInput("no columns to concatenate".into()));
    }
    let mut cols = Vec::with_capacity(columns.len());
    for c in columns {
        if panel.column_kind(c)? != ColumnKind::Series {
            return Err(Error::NotASeriesColumn(c.to_string()));
        }
        cols.push(panel.series_column(c)?);
    }
    let cells = (0..panel.n_instances())
        .map(|i| {
            let values: Vec<f64> = cols.iter().flat_map(|col| col[i].values().iter().copied()).collect();
            let index = TimeIndex::range(values.len())?;
            Ok(Cell::Series(TimeSeries::new(index, values)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Panel::new(vec![(name.to_string(), cells)])
}

/// Transformer form of [`column_concatenate`] over all series columns, in
/// panel order. The output column is named `concatenated`.
#[derive(Debug, Clone, Default)]
pub struct ColumnConcatenator {
    fitted: bool,
}

impl ColumnConcatenator {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Estimator for ColumnConcatenator {
    fn name(&self) -> &'static str {
        "concatenator"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Transformer
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new()
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        if let Some((name, _)) = updates.iter().next() {
            return Err(Error::UnknownParameter(name.to_string()));
        }
        self.fitted = false;
        Ok(())
    }
}

impl Transformer for ColumnConcatenator {
    fn input_kind(&self) -> DataKind {
        DataKind::Panel
    }

    fn output_kind(&self) -> DataKind {
        DataKind::Panel
    }

    fn fit(&mut self, data: &Data) -> Result<()> {
        data.as_panel()?;
        self.fitted = true;
        Ok(())
    }

    fn transform(&self, data: &Data) -> Result<Data> {
        if !self.fitted {
            return Err(Error::NotFitted);
        }
        let panel = data.as_panel()?;
        let names = panel.series_column_names();
        Ok(Data::Panel(column_concatenate(panel, &names, "concatenated")?))
    }

    fn clone_unfitted(&self) -> Box<dyn Transformer> {
        Box::new(Self::new())
    }
}
