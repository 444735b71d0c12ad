use std::ops::Range;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitMethod {
    /// Training window grows from the series start.
    Expanding,
    /// Training window of fixed length slides forward.
    Sliding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub method: SplitMethod,
    pub initial_window: usize,
    pub step: usize,
    pub fh_length: usize,
}

impl SplitSpec {
    pub fn new(method: SplitMethod, initial_window: usize, step: usize, fh_length: usize) -> Result<Self> {
        for (name, v) in [("initial_window", initial_window), ("step", step), ("fh_length", fh_length)] {
            if v == 0 {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: "must be >= 1".into(),
                });
            }
        }
        Ok(Self {
            method,
            initial_window,
            step,
            fh_length,
        })
    }
}

/// Train and test positions of one fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Range<usize>,
    pub test: Range<usize>,
}

/// Rolling-origin folds over a series of length `n`. The test window is the
/// `fh_length` positions right after the training window; folds are emitted
/// while it fits inside the series.
pub fn temporal_split(n: usize, spec: &SplitSpec) -> Result<Vec<Fold>> {
    let needed = spec.initial_window + spec.fh_length;
    if needed > n {
        return Err(Error::SeriesTooShort { needed, actual: n });
    }
    let mut folds = Vec::new();
    let mut k = 0;
    loop {
        let end = spec.initial_window + k * spec.step;
        if end + spec.fh_length > n {
            break;
        }
        let start = match spec.method {
            SplitMethod::Expanding => 0,
            SplitMethod::Sliding => k * spec.step,
        };
        folds.push(Fold {
            train: start..end,
            test: end..end + spec.fh_length,
        });
        k += 1;
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_enumerated_folds() {
        let exp = SplitSpec::new(SplitMethod::Expanding, 3, 1, 1).unwrap();
        assert_eq!(
            temporal_split(5, &exp).unwrap(),
            vec![Fold { train: 0..3, test: 3..4 }, Fold { train: 0..4, test: 4..5 }]
        );
        let sl = SplitSpec::new(SplitMethod::Sliding, 3, 1, 1).unwrap();
        assert_eq!(
            temporal_split(5, &sl).unwrap(),
            vec![Fold { train: 0..3, test: 3..4 }, Fold { train: 1..4, test: 4..5 }]
        );
        let long = SplitSpec::new(SplitMethod::Expanding, 4, 1, 2).unwrap();
        assert_eq!(temporal_split(5, &long), Err(Error::SeriesTooShort { needed: 6, actual: 5 }));
        assert!(SplitSpec::new(SplitMethod::Sliding, 3, 0, 1).is_err());
    }

    proptest! {
        #[test]
        fn folds_are_ordered_and_contiguous(
            n in 2usize..60, w0 in 1usize..20, step in 1usize..5, fh in 1usize..6, sliding: bool,
        ) {
            let method = if sliding { SplitMethod::Sliding } else { SplitMethod::Expanding };
            let spec = SplitSpec::new(method, w0, step, fh).unwrap();
            match temporal_split(n, &spec) {
                Err(_) => prop_assert!(w0 + fh > n),
                Ok(folds) => {
                    prop_assert_eq!(folds.len(), (n - w0 - fh) / step + 1);
                    for (k, f) in folds.iter().enumerate() {
                        prop_assert!(f.train.end - 1 < f.test.start);
                        prop_assert_eq!(f.test.start, f.train.end);
                        prop_assert_eq!(f.test.len(), fh);
                        prop_assert!(f.test.end <= n);
                        let train_len = if sliding { w0 } else { w0 + k * step };
                        prop_assert_eq!(f.train.len(), train_len);
                    }
                }
            }
        }
    }
}
