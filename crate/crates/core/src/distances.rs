//! Lock-step and elastic distances between value sequences.
//!
//! The DTW family uses squared local costs and returns the accumulated
//! cost without a final square root.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceKind {
    Euclidean,
    Dtw,
    Ddtw,
    Wdtw,
}

impl DistanceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DistanceKind::Euclidean => "euclidean",
            DistanceKind::Dtw => "dtw",
            DistanceKind::Ddtw => "ddtw",
            DistanceKind::Wdtw => "wdtw",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "euclidean" => DistanceKind::Euclidean,
            "dtw" => DistanceKind::Dtw,
            "ddtw" => DistanceKind::Ddtw,
            "wdtw" => DistanceKind::Wdtw,
            other => {
                return Err(Error::InvalidParameter {
                    name: "distance".into(),
                    reason: format!("unknown distance `{other}`"),
                })
            }
        })
    }
}

/// A distance measure with its hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSpec {
    kind: DistanceKind,
    band: Option<f64>,
    g: Option<f64>,
}

/// Default WDTW penalty steepness.
pub const DEFAULT_WDTW_G: f64 = 0.05;

impl DistanceSpec {
    pub fn euclidean() -> Self {
        Self {
            kind: DistanceKind::Euclidean,
            band: None,
            g: None,
        }
    }

    pub fn dtw(band: Option<f64>) -> Result<Self> {
        check_band(band)?;
        Ok(Self {
            kind: DistanceKind::Dtw,
            band,
            g: None,
        })
    }

    pub fn ddtw(band: Option<f64>) -> Result<Self> {
        check_band(band)?;
        Ok(Self {
            kind: DistanceKind::Ddtw,
            band,
            g: None,
        })
    }

    pub fn wdtw(g: f64) -> Result<Self> {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "g".into(),
                reason: format!("{g} is not a finite non-negative number"),
            });
        }
        Ok(Self {
            kind: DistanceKind::Wdtw,
            band: None,
            g: Some(g),
        })
    }

    /// Builds a distance configuration from a kind name and optional parameters, rejecting
    /// parameters that do not apply to the kind.
    pub fn new(kind: DistanceKind, band: Option<f64>, g: Option<f64>) -> Result<Self> {
        let misplaced = |name: &str| Error::InvalidParameter {
            name: name.into(),
            reason: format!("not applicable to {}", kind.as_str()),
        };
        match kind {
            DistanceKind::Euclidean => {
                if band.is_some() {
                    return Err(misplaced("band"));
                }
                if g.is_some() {
                    return Err(misplaced("g"));
                }
                Ok(Self::euclidean())
            }
            DistanceKind::Dtw | DistanceKind::Ddtw => {
                if g.is_some() {
                    return Err(misplaced("g"));
                }
                if kind == DistanceKind::Dtw {
                    Self::dtw(band)
                } else {
                    Self::ddtw(band)
                }
            }
            DistanceKind::Wdtw => {
                if band.is_some() {
                    return Err(misplaced("band"));
                }
                Self::wdtw(g.unwrap_or(DEFAULT_WDTW_G))
            }
        }
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn band(&self) -> Option<f64> {
        self.band
    }

    pub fn g(&self) -> Option<f64> {
        self.g
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self.kind {
            DistanceKind::Euclidean => euclidean_distance(x, y),
            DistanceKind::Dtw => dtw_distance(x, y, self.band),
            DistanceKind::Ddtw => ddtw_distance(x, y, self.band),
            DistanceKind::Wdtw => wdtw_distance(x, y, self.g.unwrap_or(DEFAULT_WDTW_G)),
        }
    }
}

fn check_band(band: Option<f64>) -> Result<()> {
    match band {
        Some(r) if !(0.0..=1.0).contains(&r) => Err(Error::InvalidParameter {
            name: "band".into(),
            reason: format!("{r} is outside [0, 1]"),
        }),
        _ => Ok(()),
    }
}

pub fn euclidean_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySeries);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

/// Accumulated-cost table of the DTW recursion, `(m+1)×(n+1)` with an
/// infinite border except for the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<f64>,
}

impl CostMatrix {
    fn new(m: usize, n: usize) -> Self {
        let mut cells = vec![f64::INFINITY; (m + 1) * (n + 1)];
        cells[0] = 0.0;
        Self {
            rows: m + 1,
            cols: n + 1,
            cells,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.cells[i * self.cols + j] = v;
    }

    /// Total cost of the best alignment.
    pub fn total(&self) -> f64 {
        self.get(self.rows - 1, self.cols - 1)
    }
}

/// Sakoe–Chiba window in cells for band fraction `r`.
pub fn band_window(r: f64, m: usize, n: usize) -> usize {
    (r * m.max(n) as f64).ceil() as usize
}

/// Fills the DTW table with local cost `cost(i, j)` for 0-based positions,
/// restricted to `|i − j| ≤ window` when a window is given.
pub fn dtw_cost_matrix<F>(m: usize, n: usize, window: Option<usize>, cost: F) -> Result<CostMatrix>
where
    F: Fn(usize, usize) -> f64,
{
    if m == 0 || n == 0 {
        return Err(Error::EmptySeries);
    }
    if let Some(w) = window {
        if m.abs_diff(n) > w {
            return Err(Error::BandTooNarrow { window: w, m, n });
        }
    }
    let mut table = CostMatrix::new(m, n);
    for i in 1..=m {
        let (lo, hi) = match window {
            Some(w) => (i.saturating_sub(w).max(1), (i + w).min(n)),
            None => (1, n),
        };
        for j in lo..=hi {
            let best = table
                .get(i - 1, j - 1)
                .min(table.get(i - 1, j))
                .min(table.get(i, j - 1));
            table.set(i, j, cost(i - 1, j - 1) + best);
        }
    }
    Ok(table)
}

pub fn dtw_distance(x: &[f64], y: &[f64], band: Option<f64>) -> Result<f64> {
    check_band(band)?;
    let window = band.map(|r| band_window(r, x.len(), y.len()));
    let table = dtw_cost_matrix(x.len(), y.len(), window, |i, j| {
        let d = x[i] - y[j];
        d * d
    })?;
    Ok(table.total())
}

/// Derivative transform: interior points average the backward difference
/// and half the central difference; endpoints copy their neighbours.
pub fn derivative(v: &[f64]) -> Result<Vec<f64>> {
    let n = v.len();
    if n < 3 {
        return Err(Error::SeriesTooShort {
            needed: 3,
            actual: n,
        });
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = ((v[i] - v[i - 1]) + (v[i + 1] - v[i - 1]) / 2.0) / 2.0;
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    Ok(d)
}

pub fn ddtw_distance(x: &[f64], y: &[f64], band: Option<f64>) -> Result<f64> {
    dtw_distance(&derivative(x)?, &derivative(y)?, band)
}

pub fn wdtw_distance(x: &[f64], y: &[f64], g: f64) -> Result<f64> {
    let half = x.len().max(y.len()) as f64 / 2.0;
    let table = dtw_cost_matrix(x.len(), y.len(), None, |i, j| {
        let weight = 1.0 / (1.0 + (-g * (i.abs_diff(j) as f64 - half)).exp());
        let d = x[i] - y[j];
        weight * d * d
    })?;
    Ok(table.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Minimum cost over every monotone alignment path, by exhaustive
    /// recursion from (0, 0) to (m−1, n−1).
    fn brute_force_dtw(x: &[f64], y: &[f64]) -> f64 {
        fn walk(x: &[f64], y: &[f64], i: usize, j: usize) -> f64 {
            let c = (x[i] - y[j]).powi(2);
            if i + 1 == x.len() && j + 1 == y.len() {
                return c;
            }
            let mut best = f64::INFINITY;
            if i + 1 < x.len() && j + 1 < y.len() {
                best = best.min(walk(x, y, i + 1, j + 1));
            }
            if i + 1 < x.len() {
                best = best.min(walk(x, y, i + 1, j));
            }
            if j + 1 < y.len() {
                best = best.min(walk(x, y, i, j + 1));
            }
            c + best
        }
        walk(x, y, 0, 0)
    }

    #[test]
    fn hand_examples() {
        assert_eq!(euclidean_distance(&[0., 0.], &[1., 1.]).unwrap(), 2f64.sqrt());
        assert_eq!(dtw_distance(&[1., 2., 3.], &[1., 2., 2., 3.], None).unwrap(), 0.0);
        assert_eq!(dtw_distance(&[0., 0.], &[1., 1.], None).unwrap(), 2.0);
        assert_eq!(ddtw_distance(&[0., 1., 2., 3.], &[0., 2., 4., 6.], None).unwrap(), 4.0);
        assert_eq!(ddtw_distance(&[3., 3., 3.], &[5., 5., 5.], None).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let w = wdtw_distance(&[0., 0.], &[1., 1.], 1.0).unwrap();
        assert!((w - 2.0 / (1.0 + e)).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert_eq!(
            euclidean_distance(&[1.], &[1., 2.]),
            Err(Error::LengthMismatch { expected: 1, actual: 2 })
        );
        assert_eq!(dtw_distance(&[], &[1.], None), Err(Error::EmptySeries));
        assert_eq!(
            dtw_distance(&[1., 2.], &[1., 2., 3., 4.], Some(0.25)),
            Err(Error::BandTooNarrow { window: 1, m: 2, n: 4 })
        );
        assert_eq!(
            ddtw_distance(&[1., 2.], &[1., 2., 3.], None),
            Err(Error::SeriesTooShort { needed: 3, actual: 2 })
        );
        assert!(DistanceSpec::dtw(Some(1.5)).is_err());
        assert!(DistanceSpec::wdtw(-1.0).is_err());
        assert!(DistanceSpec::new(DistanceKind::Euclidean, Some(0.1), None).is_err());
        assert!(DistanceSpec::new(DistanceKind::Dtw, None, Some(0.1)).is_err());
    }

    #[test]
    fn exhaustive_small_oracle() {
        // every pair of length-3 sequences over {0, 1, 2}
        let seqs: Vec<Vec<f64>> = (0..27)
            .map(|k| vec![(k % 3) as f64, (k / 3 % 3) as f64, (k / 9) as f64])
            .collect();
        for a in &seqs {
            for b in &seqs {
                assert_eq!(dtw_distance(a, b, None).unwrap(), brute_force_dtw(a, b));
            }
        }
    }

    #[test]
    fn zero_band_is_lockstep_squared() {
        let x = [1., 4., 2., 0.];
        let y = [0., 1., 3., 3.];
        let sq: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        assert_eq!(dtw_distance(&x, &y, Some(0.0)).unwrap(), sq);
    }

    fn small_seq() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec((0u8..3).prop_map(f64::from), 1..=6)
    }

    proptest! {
        #[test]
        fn matches_path_enumeration(x in small_seq(), y in small_seq()) {
            prop_assert_eq!(dtw_distance(&x, &y, None).unwrap(), brute_force_dtw(&x, &y));
        }

        #[test]
        fn dtw_properties(x in proptest::collection::vec(-5.0f64..5.0, 1..15), y in proptest::collection::vec(-5.0f64..5.0, 1..15)) {
            let d = dtw_distance(&x, &y, None).unwrap();
            prop_assert_eq!(d, dtw_distance(&y, &x, None).unwrap());
            prop_assert!(d >= 0.0);
            prop_assert_eq!(dtw_distance(&x, &x, None).unwrap(), 0.0);
            prop_assert_eq!(d, dtw_distance(&x, &y, Some(1.0)).unwrap());
            let half = wdtw_distance(&x, &y, 0.0).unwrap();
            prop_assert!((half - d / 2.0).abs() <= 1e-12);
        }

        #[test]
        fn dtw_bounded_by_lockstep(pairs in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..15)) {
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let sq: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
            prop_assert!(dtw_distance(&x, &y, None).unwrap() <= sq);
            prop_assert!(dtw_distance(&x, &y, Some(0.3)).unwrap() <= sq);
        }

        #[test]
        fn ddtw_offset_invariant(x in proptest::collection::vec(-5.0f64..5.0, 3..12), y in proptest::collection::vec(-5.0f64..5.0, 3..12), c in -100.0f64..100.0) {
            let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
            let a = ddtw_distance(&x, &y, None).unwrap();
            let b = ddtw_distance(&shifted, &y, None).unwrap();
            prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
        }

        #[test]
        fn euclidean_symmetric(pairs in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..15)) {
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            prop_assert_eq!(euclidean_distance(&x, &y).unwrap(), euclidean_distance(&y, &x).unwrap());
        }
    }
}
