use super::{map_series_cells, Data, DataKind, Transformer};
use crate::data::{TimeIndex, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorKind, ParamMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Mean,
    Sum,
    Min,
    Max,
}

impl Aggregation {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "mean" => Aggregation::Mean,
            "sum" => Aggregation::Sum,
            "min" => Aggregation::Min,
            "max" => Aggregation::Max,
            other => {
                return Err(Error::InvalidParameter {
                    name: "agg".into(),
                    reason: format!("unknown aggregation `{other}`"),
                })
            }
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Aggregation::Mean => "mean",
            Aggregation::Sum => "sum",
            Aggregation::Min => "min",
            Aggregation::Max => "max",
        }
    }

    fn apply(&self, values: &[f64]) -> f64 {
        match self {
            Aggregation::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregation::Sum => values.iter().sum(),
            Aggregation::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregation::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Aggregates `y` into `n_bins` contiguous bins of near-equal count. The
/// first T mod n_bins bins hold one extra point. Each output point sits at
/// the first time point of its bin.
pub fn time_bin_aggregate(y: &TimeSeries, n_bins: usize, agg: Aggregation) -> Result<TimeSeries> {
    let t = y.len();
    if n_bins == 0 || n_bins > t {
        return Err(Error::TooManyBins { bins: n_bins, len: t });
    }
    let base = t / n_bins;
    let extra = t % n_bins;
    let mut times = Vec::with_capacity(n_bins);
    let mut values = Vec::with_capacity(n_bins);
    let mut start = 0;
    for b in 0..n_bins {
        let size = base + usize::from(b < extra);
        times.push(y.times()[start]);
        values.push(agg.apply(&y.values()[start..start + size]));
        start += size;
    }
    TimeSeries::new(TimeIndex::new(times)?, values)
}

/// Series-to-series transformer binning every series cell of a panel.
#[derive(Debug, Clone)]
pub struct TimeBinner {
    n_bins: usize,
    agg: Aggregation,
    fitted: bool,
}

impl TimeBinner {
    pub fn new(n_bins: usize, agg: Aggregation) -> Self {
        Self {
            n_bins,
            agg,
            fitted: false,
        }
    }
}

impl Estimator for TimeBinner {
    fn name(&self) -> &'static str {
        "binner"
    }

    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Transformer
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn get_params(&self) -> ParamMap {
        ParamMap::new()
            .with("agg", self.agg.as_str())
            .with("n_bins", self.n_bins)
    }

    fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let mut next = Self::new(self.n_bins, self.agg);
        for (name, value) in updates.iter() {
            match name {
                "agg" => next.agg = Aggregation::parse(value.as_str(name)?)?,
                "n_bins" => next.n_bins = value.as_usize(name)?,
                other => return Err(Error::UnknownParameter(other.to_string())),
            }
        }
        *self = next;
        Ok(())
    }
}

impl Transformer for TimeBinner {
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
        let panel = map_series_cells(data.as_panel()?, |s| {
            time_bin_aggregate(s, self.n_bins, self.agg)
        })?;
        Ok(Data::Panel(panel))
    }

    fn clone_unfitted(&self) -> Box<dyn Transformer> {
        Box::new(Self::new(self.n_bins, self.agg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Panel;
    use proptest::prelude::*;

    fn y(values: &[f64]) -> TimeSeries {
        TimeSeries::from_values(values.to_vec()).unwrap()
    }

    #[test]
    fn hand_examples() {
        let out = time_bin_aggregate(&y(&[1., 2., 3., 4.]), 2, Aggregation::Mean).unwrap();
        assert_eq!(out.values(), &[1.5, 3.5]);
        assert_eq!(out.times(), &[0, 2]);
        let out = time_bin_aggregate(&y(&[1., 2., 3.]), 2, Aggregation::Sum).unwrap();
        assert_eq!(out.values(), &[3., 3.]);
        let out = time_bin_aggregate(&y(&[4., 1., 3.]), 1, Aggregation::Min).unwrap();
        assert_eq!(out.values(), &[1.]);
        let out = time_bin_aggregate(&y(&[4., 1., 3.]), 1, Aggregation::Max).unwrap();
        assert_eq!(out.values(), &[4.]);
        assert_eq!(
            time_bin_aggregate(&y(&[1.]), 2, Aggregation::Mean),
            Err(Error::TooManyBins { bins: 2, len: 1 })
        );
    }

    #[test]
    fn binner_on_panel() {
        let panel = Panel::from_series("a", vec![y(&[1., 2., 3., 4.])]).unwrap();
        let mut b = TimeBinner::new(2, Aggregation::Sum);
        let out = b.fit_transform(&Data::Panel(panel)).unwrap();
        let p = out.as_panel().unwrap();
        assert_eq!(p.series_column("a").unwrap()[0].values(), &[3., 7.]);
        b.set_params(&ParamMap::new().with("agg", "max")).unwrap();
        assert!(!b.is_fitted());
    }

    proptest! {
        #[test]
        fn identity_when_bins_equal_length(values in proptest::collection::vec(-1e3f64..1e3, 1..30)) {
            let s = y(&values);
            let out = time_bin_aggregate(&s, values.len(), Aggregation::Mean).unwrap();
            prop_assert_eq!(out, s);
        }

        #[test]
        fn sum_preserves_total(values in proptest::collection::vec(-1e3f64..1e3, 1..60), bins in 1usize..60) {
            prop_assume!(bins <= values.len());
            let out = time_bin_aggregate(&y(&values), bins, Aggregation::Sum).unwrap();
            let a: f64 = out.values().iter().sum();
            let b: f64 = values.iter().sum();
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs().max(values.len() as f64 * 1e3)));
            // bin sizes are non-increasing
            let sizes: Vec<i64> = out.times().windows(2).map(|w| w[1] - w[0]).collect();
            prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
