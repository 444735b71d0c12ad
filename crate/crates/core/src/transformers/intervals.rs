use rand::Rng as _;

use super::{Data, DataKind, Transformer};
use crate::data::{Cell, Panel, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, ParamMap};
use crate::random::rng_from;

/// Shortest interval drawn for interval-based classifiers.
pub const MIN_INTERVAL_LENGTH: usize = 3;

/// Half-open position range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self, len: usize) -> Result<()> {
        if self.start >= self.end || self.end > len {
            return Err(Error::IntervalOutOfBounds {
                start: self.start,
                end: self.end,
                len,
            });
        }
        Ok(())
    }
}

pub fn segment_intervals(y: &TimeSeries, intervals: &[Interval]) -> Result<Vec<TimeSeries>> {
    intervals
        .iter()
        .map(|iv| {
            iv.check(y.len())?;
            y.slice(iv.start, iv.end)
        })
        .collect()
}

/// Draws `n` intervals over a series of length `t`. Each length is uniform
/// on `[min_length, t]`, then the start is uniform over the positions
/// where that length fits.
pub fn draw_random_intervals(t: usize, n: usize, min_length: usize, seed: u64) -> Result<Vec<Interval>> {
    if n == 0 || min_length == 0 {
        return Err(Error::InvalidParameter {
            name: if n == 0 { "n_intervals" } else { "min_length" }.into(),
            reason: "must be >= 1".into(),
        });
    }
    if t < min_length {
        return Err(Error::SeriesTooShort {
            needed: min_length,
            actual: t,
        });
    }
    let mut rng = rng_from(seed);
    Ok((0..n)
        .map(|_| {
            let len = rng.random_range(min_length..=t);
            let start = rng.random_range(0..=t - len);
            Interval::new(start, start + len)
        })
        .collect())
}

/// Series-to-series transformer that replaces each series column `c` with
/// one column `c[start:end]` per interval.
#[derive(Debug, Clone)]
pub struct IntervalSegmenter {
    intervals: Vec<Interval>,
    fitted: bool,
}

impl IntervalSegmenter {
    pub fn new(intervals: Vec<Interval>) -> Self {
        Self {
            intervals,
            fitted: false,
        }
    }
}

fn format_intervals(intervals: &[Interval]) -> String {
    intervals
        .iter()
        .map(|iv| format!("{}:{}", iv.start, iv.end))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_intervals(raw: &str) -> Result<Vec<Interval>> {
    let bad = || Error::InvalidParameter {
        name: "intervals".into(),
        reason: format!("expected `start:end,...`, got `{raw}`"),
    };
    raw.split(',')
        .map(|part| {
            let (a, b) = part.trim().split_once(':').ok_or_else(bad)?;
            let start = a.parse().map_err(|_| bad())?;
            let end = b.parse().map_err(|_| bad())?;
            Ok(Interval::new(start, end))
        })
        .collect()
}

impl Estimator for IntervalSegmenter {
    fn name(&self) -> &'static str {
        "segmenter"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Transformer
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new().with("intervals", format_intervals(&self.intervals).as_str())
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let mut intervals = self.intervals.clone();
        for (name, value) in updates.iter() {
            match name {
                "intervals" => intervals = parse_intervals(value.as_str(name)?)?,
                other => return Err(Error::UnknownParameter(other.to_string())),
            }
        }
        *self = Self::new(intervals);
        Ok(())
    }
}

impl Transformer for IntervalSegmenter {
    fn input_kind(&self) -> DataKind {
        DataKind::Panel
    }

    fn output_kind(&self) -> DataKind {
        DataKind::Panel
    }

    fn fit(&mut self, data: &Data) -> Result<()> {
        data.as_panel()?;
        if self.intervals.is_empty() {
            return Err(Error::EmptyInput("no intervals".into()));
        }
        self.fitted = true;
        Ok(())
    }

    fn transform(&self, data: &Data) -> Result<Data> {
        if !self.fitted {
            return Err(Error::NotFitted);
        }
        let panel = data.as_panel()?;
        let mut columns = Vec::new();
        for (name, cells) in panel.columns() {
            match cells[0] {
                Cell::Primitive(_) => columns.push((name.to_string(), cells.to_vec())),
                Cell::Series(_) => {
                    let segments = panel
                        .series_column(name)?
                        .into_iter()
                        .map(|s| segment_intervals(s, &self.intervals))
                        .collect::<Result<Vec<_>>>()?;
                    for (k, iv) in self.intervals.iter().enumerate() {
                        let cells = segments.iter().map(|seg| Cell::Series(seg[k].clone())).collect();
                        columns.push((format!("{name}[{}:{}]", iv.start, iv.end), cells));
                    }
                }
            }
        }
        Ok(Data::Panel(Panel::new(columns)?))
    }

    fn clone_unfitted(&self) -> Box<dyn Transformer> {
        Box::new(Self::new(self.intervals.clone()))
    }
}
