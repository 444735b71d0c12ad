//! Sliding-window conversion of a single series into a regression table.

use super::{Data, DataKind, Transformer};
use crate::data::TimeSeries;
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, ParamMap};
use crate::tabular::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct TabularizedSet {
    pub x: Matrix,
    pub y: Vec<f64>,
    /// Time point of each row's target.
    pub row_times: Vec<i64>,
}

/// Windows of `w` consecutive values, each paired with the value one step
/// after the window.
pub fn tabularize_sliding(y: &TimeSeries, w: usize) -> Result<TabularizedSet> {
    tabularize_offset(y, w, 1)
}

/// Windows of `w` values paired with the value `h` steps after the window
/// ends. Yields T − w − h + 1 rows.
pub fn tabularize_offset(y: &TimeSeries, w: usize, h: usize) -> Result<TabularizedSet> {
    if w == 0 || h == 0 {
        return Err(Error::InvalidParameter {
            name: if w == 0 { "window_length" } else { "step" }.into(),
            reason: "must be >= 1".into(),
        });
    }
    y.step()?;
    let t = y.len();
    if t < w + h {
        return Err(Error::WindowTooLong { window: w, len: t });
    }
    let n = t - w - h + 1;
    let v = y.values();
    let data = (0..n).flat_map(|i| v[i..i + w].iter().copied()).collect();
    Ok(TabularizedSet {
        x: Matrix::new(n, w, data)?,
        y: (0..n).map(|i| v[i + w + h - 1]).collect(),
        row_times: (0..n).map(|i| y.times()[i + w + h - 1]).collect(),
    })
}

/// Panel to table: flattens the series of every column into one row per
/// instance, columns side by side. Requires equal lengths within a column.
#[derive(Debug, Clone, Default)]
pub struct Tabularizer {
    widths: Option<Vec<(String, usize)>>,
}

impl Tabularizer {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Estimator for Tabularizer {
    fn name(&self) -> &'static str {
        "tabularizer"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Transformer
    }

    fn is_fitted(&self) -> bool {
        self.widths.is_some()
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new()
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        if let Some((name, _)) = updates.iter().next() {
            return Err(Error::UnknownParameter(name.to_string()));
        }
        self.widths = None;
        Ok(())
    }
}

impl Transformer for Tabularizer {
    fn input_kind(&self) -> DataKind {
        DataKind::Panel
    }

    fn output_kind(&self) -> DataKind {
        DataKind::Table
    }

    fn fit(&mut self, data: &Data) -> Result<()> {
        let panel = data.as_panel()?;
        let mut widths = Vec::new();
        for name in panel.column_names() {
            let series = panel.series_column(name)?;
            let len = series[0].len();
            if let Some(bad) = series.iter().find(|s| s.len() != len) {
                return Err(Error::LengthMismatch {
                    expected: len,
                    actual: bad.len(),
                });
            }
            widths.push((name.clone(), len));
        }
        self.widths = Some(widths);
        Ok(())
    }

    fn transform(&self, data: &Data) -> Result<Data> {
        let widths = self.widths.as_ref().ok_or(Error::NotFitted)?;
        let panel = data.as_panel()?;
        let total: usize = widths.iter().map(|(_, w)| w).sum();
        let mut rows = vec![Vec::with_capacity(total); panel.n_instances()];
        for (name, width) in widths {
            for (row, s) in rows.iter_mut().zip(panel.series_column(name)?) {
                if s.len() != *width {
                    return Err(Error::LengthMismatch {
                        expected: *width,
                        actual: s.len(),
                    });
                }
                row.extend_from_slice(s.values());
            }
        }
        Ok(Data::Table(Matrix::from_rows(&rows)?))
    }

    fn clone_unfitted(&self) -> Box<dyn Transformer> {
        Box::new(Self::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Panel;
    use proptest::prelude::*;

    #[test]
    fn hand_enumerated_windows() {
        let y = TimeSeries::from_values(vec![1., 2., 3., 4., 5.]).unwrap();
        let set = tabularize_sliding(&y, 2).unwrap();
        assert_eq!(
            set.x,
            Matrix::from_rows(&[vec![1., 2.], vec![2., 3.], vec![3., 4.]]).unwrap()
        );
        assert_eq!(set.y, vec![3., 4., 5.]);
        assert_eq!(set.row_times, vec![2, 3, 4]);
    }

    #[test]
    fn offset_windows() {
        let y = TimeSeries::from_values(vec![1., 2., 3., 4., 5.]).unwrap();
        let set = tabularize_offset(&y, 2, 2).unwrap();
        assert_eq!(set.x.n_rows(), 2);
        assert_eq!(set.y, vec![4., 5.]);
    }

    #[test]
    fn window_too_long() {
        let y = TimeSeries::from_values(vec![1., 2.]).unwrap();
        assert_eq!(
            tabularize_sliding(&y, 2),
            Err(Error::WindowTooLong { window: 2, len: 2 })
        );
        let gaps = TimeSeries::from_pairs(vec![0, 1, 5], vec![1., 2., 3.]).unwrap();
        assert_eq!(tabularize_sliding(&gaps, 1), Err(Error::UnequalSpacing));
    }

    #[test]
    fn panel_to_table() {
        let s = |v: Vec<f64>| TimeSeries::from_values(v).unwrap();
        let panel = Panel::from_series("a", vec![s(vec![1., 2.]), s(vec![3., 4.])]).unwrap();
        let mut t = Tabularizer::new();
        let data = Data::Panel(panel);
        assert_eq!(t.transform(&data), Err(Error::NotFitted));
        let out = t.fit_transform(&data).unwrap();
        assert_eq!(out, Data::Table(Matrix::from_rows(&[vec![1., 2.], vec![3., 4.]]).unwrap()));
    }

    proptest! {
        #[test]
        fn window_layout(values in proptest::collection::vec(-100.0f64..100.0, 2..40), w in 1usize..10) {
            prop_assume!(values.len() > w);
            let y = TimeSeries::from_values(values.clone()).unwrap();
            let set = tabularize_sliding(&y, w).unwrap();
            prop_assert_eq!(set.x.n_rows(), values.len() - w);
            for i in 0..set.x.n_rows() {
                prop_assert_eq!(set.x.get(i, w - 1), values[i + w - 1]);
                prop_assert_eq!(set.y[i], values[i + w]);
            }
        }
    }
}
