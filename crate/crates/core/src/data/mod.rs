//! Containers for single series and nested panel data.

mod panel;
mod series;

pub use panel::{Cell, ColumnKind, LongRecord, LongTable, Panel, Primitive};
pub use series::{TimeIndex, TimeSeries};
