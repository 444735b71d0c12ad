//! Transformers: tabular, series-to-primitives, series-to-series and
//! detrending, plus the sliding-window tabularizer used by reduction.

mod binning;
mod detrend;
mod features;
mod intervals;
mod scaler;
mod tabularize;

pub use binning::{time_bin_aggregate, Aggregation, TimeBinner};
pub use detrend::{
    detrend_inverse, detrend_transform, detrender_fit, Detrender, DetrenderState, FittedTrend,
    TrendSpec,
};
pub(crate) use features::{mean, sample_std, slope};
pub use features::{
    extract_summary_features, InstanceFeaturizer, PerInstanceFeatures, SummaryFeature,
    SummaryFeatures,
};
pub use intervals::{
    draw_random_intervals, segment_intervals, Interval, IntervalSegmenter, MIN_INTERVAL_LENGTH,
};
pub use scaler::StandardScaler;
pub use tabularize::{tabularize_offset, tabularize_sliding, TabularizedSet, Tabularizer};

use crate::data::{Cell, Panel, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::Estimator;
use crate::tabular::Matrix;

/// Input or output of a transformer.
#[derive(Debug, Clone, PartialEq)]
pub enum Data {
    Panel(Panel),
    Table(Matrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    Panel,
    Table,
}

impl Data {
    pub fn kind(&self) -> DataKind {
        match self {
            Data::Panel(_) => DataKind::Panel,
            Data::Table(_) => DataKind::Table,
        }
    }

    pub fn as_panel(&self) -> Result<&Panel> {
        match self {
            Data::Panel(p) => Ok(p),
            Data::Table(_) => Err(Error::IncompatibleStep {
                step: String::new(),
                reason: "expected panel input, got a table".into(),
            }),
        }
    }

    pub fn as_table(&self) -> Result<&Matrix> {
        match self {
            Data::Table(m) => Ok(m),
            Data::Panel(_) => Err(Error::IncompatibleStep {
                step: String::new(),
                reason: "expected table input, got a panel".into(),
            }),
        }
    }

    pub fn n_instances(&self) -> usize {
        match self {
            Data::Panel(p) => p.n_instances(),
            Data::Table(m) => m.n_rows(),
        }
    }
}

pub trait Transformer: Estimator {
    fn input_kind(&self) -> DataKind;

    fn output_kind(&self) -> DataKind;

    /// Learns any state from `data`. Stateless transformers still record
    /// that they were fitted.
    fn fit(&mut self, data: &Data) -> Result<()>;

    fn transform(&self, data: &Data) -> Result<Data>;

    fn fit_transform(&mut self, data: &Data) -> Result<Data> {
        self.fit(data)?;
        self.transform(data)
    }

    fn clone_unfitted(&self) -> Box<dyn Transformer>;
}

/// Applies `f` to every series cell of a panel, leaving primitive columns
/// untouched.
pub(crate) fn map_series_cells<F>(panel: &Panel, f: F) -> Result<Panel>
where
    F: Fn(&TimeSeries) -> Result<TimeSeries>,
{
    let mut columns = Vec::with_capacity(panel.n_columns());
    for (name, cells) in panel.columns() {
        let mapped = cells
            .iter()
            .map(|c| match c {
                Cell::Series(s) => f(s).map(Cell::Series),
                other => Ok(other.clone()),
            })
            .collect::<Result<Vec<_>>>()?;
        columns.push((name.to_string(), mapped));
    }
    Panel::new(columns)
}
