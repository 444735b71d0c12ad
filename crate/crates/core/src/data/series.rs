use crate::error::{Error, Result};

/// Strictly increasing integer time points at a fixed resolution.
///
/// Calendar time is represented as integer offsets from an epoch; the
/// container never interprets the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimeIndex(Vec<i64>);

impl TimeIndex {
    pub fn new(points: Vec<i64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidTimeIndex("empty".into()));
        }
        if let Some(pos) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTimeIndex(format!(
                "{} follows {} at position {}",
                points[pos + 1],
                points[pos],
                pos + 1
            )));
        }
        Ok(Self(points))
    }

    /// Positions `0..len`.
    pub fn range(len: usize) -> Result<Self> {
        Self::new((0..len as i64).collect())
    }

    /// `len` points starting at `start`, `step` apart.
    pub fn regular(start: i64, step: i64, len: usize) -> Result<Self> {
        if step < 1 {
            return Err(Error::InvalidTimeIndex(format!("step {step} < 1")));
        }
        Self::new((0..len as i64).map(|i| start + i * step).collect())
    }

    pub fn points(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> i64 {
        self.0[0]
    }

    pub fn last(&self) -> i64 {
        self.0[self.0.len() - 1]
    }

    /// Common spacing between consecutive points; `None` if irregular.
    /// A single point has spacing 1.
    pub fn step(&self) -> Option<i64> {
        if self.0.len() < 2 {
            return Some(1);
        }
        let step = self.0[1] - self.0[0];
        self.0
            .windows(2)
            .all(|w| w[1] - w[0] == step)
            .then_some(step)
    }

    pub fn position(&self, t: i64) -> Option<usize> {
        self.0.binary_search(&t).ok()
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }
}

/// A single observed series: time index paired with finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    index: TimeIndex,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(index: TimeIndex, values: Vec<f64>) -> Result<Self> {
        if index.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: index.len(),
                actual: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { index, values })
    }

    /// Series indexed by positions `0..values.len()`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        let index = TimeIndex::range(values.len())?;
        Self::new(index, values)
    }

    pub fn from_pairs(times: Vec<i64>, values: Vec<f64>) -> Result<Self> {
        Self::new(TimeIndex::new(times)?, values)
    }

    pub fn index(&self) -> &TimeIndex {
        &self.index
    }

    pub fn times(&self) -> &[i64] {
        self.index.points()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spacing of an equally spaced series, else `UnequalSpacing`.
    pub fn step(&self) -> Result<i64> {
        self.index.step().ok_or(Error::UnequalSpacing)
    }

    /// Same values re-indexed `0..len`.
    pub fn reindexed(&self) -> TimeSeries {
        TimeSeries {
            index: TimeIndex::range(self.len()).expect("non-empty series"),
            values: self.values.clone(),
        }
    }

    /// Contiguous positional sub-series `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Result<TimeSeries> {
        if start >= end || end > self.len() {
            return Err(Error::IntervalOutOfBounds {
                start,
                end,
                len: self.len(),
            });
        }
        Ok(TimeSeries {
            index: TimeIndex(self.index.points()[start..end].to_vec()),
            values: self.values[start..end].to_vec(),
        })
    }

    pub fn into_parts(self) -> (TimeIndex, Vec<f64>) {
        (self.index, self.values)
    }
}
