//! Post-hoc comparison of strategies across datasets: average ranks, the
//! Friedman test and pairwise exact sign tests.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::experiment::ExperimentResult;
use super::metrics::Metric;
use crate::error::{Error, Result};

/// Ranks with 1 for the lowest value; tied values share their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanResult {
    pub statistic: f64,
    /// Chi-squared approximation with k − 1 degrees of freedom.
    pub p_value: f64,
    pub mean_ranks: Vec<f64>,
}

/// Friedman test on `losses[j][i]`, the loss of strategy `j` on dataset `i`.
pub fn friedman_test(losses: &[Vec<f64>]) -> Result<FriedmanResult> {
    let k = losses.len();
    let n = losses.first().map_or(0, Vec::len);
    if k < 2 || n < 2 {
        return Err(Error::IncompletePivot(format!(
            "need at least 2 strategies and 2 datasets, got {k} and {n}"
        )));
    }
    if losses.iter().any(|row| row.len() != n) {
        return Err(Error::IncompletePivot("strategies cover different datasets".into()));
    }
    if losses.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::IncompletePivot("missing (NaN) cells".into()));
    }
    let mut rank_sums = vec![0.0; k];
    for i in 0..n {
        let column: Vec<f64> = losses.iter().map(|row| row[i]).collect();
        for (j, r) in average_ranks(&column).into_iter().enumerate() {
            rank_sums[j] += r;
        }
    }
    let (kf, nf) = (k as f64, n as f64);
    let mean_ranks: Vec<f64> = rank_sums.iter().map(|s| s / nf).collect();
    let sum_sq: f64 = mean_ranks.iter().map(|r| r * r).sum();
    let statistic = 12.0 * nf / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0);
    let statistic = statistic.max(0.0);
    let chi = ChiSquared::new(kf - 1.0).expect("k >= 2");
    Ok(FriedmanResult {
        statistic,
        p_value: chi.sf(statistic),
        mean_ranks,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignTest {
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
    pub p_value: f64,
}

/// Exact two-sided sign test on paired losses; ties are dropped.
pub fn sign_test(a: &[f64], b: &[f64]) -> Result<SignTest> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let wins_a = a.iter().zip(b).filter(|(x, y)| x < y).count();
    let wins_b = a.iter().zip(b).filter(|(x, y)| y < x).count();
    let n = wins_a + wins_b;
    if n == 0 {
        return Err(Error::AllTies);
    }
    let tail = binomial_upper_tail(n, wins_a.max(wins_b));
    Ok(SignTest {
        wins_a,
        wins_b,
        ties: a.len() - n,
        p_value: (2.0 * tail.min(0.5)).min(1.0),
    })
}

/// P(X ≥ m) for X ~ Binomial(n, 1/2).
fn binomial_upper_tail(n: usize, m: usize) -> f64 {
    if n < 128 {
        // Exact integer count of outcomes, scaled by 2^-n (exact in binary).
        let mut c: u128 = 1;
        let mut count: u128 = 0;
        for i in 0..=n {
            if i >= m {
                count += c;
            }
            if i < n {
                c = c * (n - i) as u128 / (i + 1) as u128;
            }
        }
        return count as f64 * 0.5f64.powi(n as i32);
    }
    // Log space for large n, where 2^-n underflows the terms.
    let mut log_p = -(n as f64) * std::f64::consts::LN_2;
    let mut tail = 0.0;
    for i in 0..=n {
        if i >= m {
            tail += log_p.exp();
        }
        if i < n {
            log_p += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
        }
    }
    tail.min(1.0)
}

/// Per-strategy, per-dataset fold-mean losses for one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Pivot {
    pub metric: String,
    pub strategies: Vec<String>,
    /// Datasets where every strategy has a finite value.
    pub datasets: Vec<String>,
    /// Datasets dropped because some strategy failed on them.
    pub flagged: Vec<String>,
    /// `losses[strategy][dataset]`, lower is better.
    pub losses: Vec<Vec<f64>>,
}

impl Pivot {
    pub fn from_result(result: &ExperimentResult, metric: &str) -> Result<Self> {
        let as_loss = |v: f64| Metric::parse(metric).map_or(v, |m| m.as_loss(v));
        let mut cells: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
        for r in result.rows.iter().filter(|r| r.metric == metric) {
            cells.entry((&r.dataset, &r.strategy)).or_default().push(r.value);
        }
        if cells.is_empty() {
            return Err(Error::IncompletePivot(format!("no rows for metric `{metric}`")));
        }
        let datasets: BTreeSet<&str> = cells.keys().map(|(d, _)| *d).collect();
        let strategies: BTreeSet<&str> = cells.keys().map(|(_, s)| *s).collect();
        let mut kept = Vec::new();
        let mut flagged = Vec::new();
        let mut columns = Vec::new();
        for d in &datasets {
            let mut column = Vec::with_capacity(strategies.len());
            for s in &strategies {
                let values = cells
                    .get(&(*d, *s))
                    .ok_or_else(|| Error::IncompletePivot(format!("no `{s}` result on `{d}`")))?;
                column.push(as_loss(values.iter().sum::<f64>() / values.len() as f64));
            }
            if column.iter().any(|v| v.is_nan()) {
                flagged.push(d.to_string());
            } else {
                kept.push(d.to_string());
                columns.push(column);
            }
        }
        let losses = (0..strategies.len())
            .map(|j| columns.iter().map(|c| c[j]).collect())
            .collect();
        Ok(Self {
            metric: metric.to_string(),
            strategies: strategies.into_iter().map(String::from).collect(),
            datasets: kept,
            flagged,
            losses,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairComparison {
    pub a: String,
    pub b: String,
    pub test: Result<SignTest>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankSummary {
    pub pivot: Pivot,
    /// Mean rank per strategy over the kept datasets.
    pub mean_ranks: Vec<f64>,
    pub friedman: Result<FriedmanResult>,
    pub pairs: Vec<PairComparison>,
}

pub fn rank_summary(result: &ExperimentResult, metric: &str) -> Result<RankSummary> {
    let pivot = Pivot::from_result(result, metric)?;
    let k = pivot.strategies.len();
    let n = pivot.datasets.len();
    let mut mean_ranks = vec![f64::NAN; k];
    if n > 0 {
        mean_ranks = vec![0.0; k];
        for i in 0..n {
            let column: Vec<f64> = pivot.losses.iter().map(|row| row[i]).collect();
            for (j, r) in average_ranks(&column).into_iter().enumerate() {
                mean_ranks[j] += r / n as f64;
            }
        }
    }
    let friedman = friedman_test(&pivot.losses);
    let mut pairs = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            pairs.push(PairComparison {
                a: pivot.strategies[a].clone(),
                b: pivot.strategies[b].clone(),
                test: sign_test(&pivot.losses[a], &pivot.losses[b]),
            });
        }
    }
    Ok(RankSummary {
        pivot,
        mean_ranks,
        friedman,
        pairs,
    })
}

impl RankSummary {
    /// Mean-rank table, best strategy first.
    pub fn ranks_text(&self) -> String {
        let p = &self.pivot;
        let mut out = format!("metric: {} ({} datasets)\n", p.metric, p.datasets.len());
        if !p.flagged.is_empty() {
            out += &format!("excluded (failed runs): {}\n", p.flagged.join(", "));
        }
        let width = p.strategies.iter().map(String::len).max().unwrap_or(0).max(8);
        out += &format!("{:<width$}  mean_rank\n", "strategy");
        let mut order: Vec<usize> = (0..p.strategies.len()).collect();
        order.sort_by(|&a, &b| self.mean_ranks[a].total_cmp(&self.mean_ranks[b]));
        for j in order {
            out += &format!("{:<width$}  {:.4}\n", p.strategies[j], self.mean_ranks[j]);
        }
        out
    }

    pub fn friedman_text(&self) -> String {
        match &self.friedman {
            Ok(fr) => format!("friedman: statistic = {:.6}, p = {:.6}\n", fr.statistic, fr.p_value),
            Err(e) => format!("friedman: not computed ({e})\n"),
        }
    }

    pub fn pairs_text(&self) -> String {
        self.pairs
            .iter()
            .map(|pair| match &pair.test {
                Ok(t) => format!(
                    "sign test {} vs {}: wins {}-{}, ties {}, p = {:.6}\n",
                    pair.a, pair.b, t.wins_a, t.wins_b, t.ties, t.p_value
                ),
                Err(e) => format!("sign test {} vs {}: not computed ({e})\n", pair.a, pair.b),
            })
            .collect()
    }
}

impl fmt::Display for RankSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.ranks_text(), self.friedman_text(), self.pairs_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::experiment::ResultRow;
    use num_rational::Ratio;
    use proptest::prelude::*;

    #[test]
    fn average_ranks_with_ties() {
        assert_eq!(average_ranks(&[0.3, 0.1, 0.3, 0.2]), vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(average_ranks(&[1.0, 1.0, 1.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn friedman_dominance_is_eight() {
        let losses = vec![vec![0.1; 4], vec![0.2; 4], vec![0.3; 4]];
        let fr = friedman_test(&losses).unwrap();
        assert!((fr.statistic - 8.0).abs() < 1e-12);
        assert_eq!(fr.mean_ranks, vec![1.0, 2.0, 3.0]);
        // chi-squared with 2 df: sf(x) = exp(−x/2)
        assert!((fr.p_value - (-4.0f64).exp()).abs() < 1e-12);
        let same = friedman_test(&[vec![0.5; 3], vec![0.5; 3]]).unwrap();
        assert_eq!(same.statistic, 0.0);
        assert!(friedman_test(&[vec![0.1]]).is_err());
        assert!(friedman_test(&[vec![0.1, f64::NAN], vec![0.2, 0.3]]).is_err());
    }

    /// Exact binomial tail with rational arithmetic.
    fn exact_tail(n: usize, m: usize) -> f64 {
        let mut c = Ratio::from_integer(1u128);
        let mut tail = Ratio::from_integer(0u128);
        for i in 0..=n {
            if i >= m {
                tail += c;
            }
            c = c * Ratio::from_integer((n - i) as u128) / Ratio::from_integer(i as u128 + 1);
        }
        let total = Ratio::from_integer(1u128 << n);
        let r = tail / total;
        *r.numer() as f64 / *r.denom() as f64
    }

    #[test]
    fn sign_test_hand_values() {
        let t = sign_test(&[0.1; 5], &[0.2; 5]).unwrap();
        assert_eq!((t.wins_a, t.wins_b), (5, 0));
        assert_eq!(t.p_value, 0.0625);
        assert_eq!(sign_test(&[0.1, 0.3], &[0.2, 0.2]).unwrap().p_value, 1.0);
        assert_eq!(sign_test(&[0.1, 0.2], &[0.1, 0.2]), Err(Error::AllTies));
        let t = sign_test(&[0.1, 0.1, 0.5], &[0.2, 0.1, 0.5]).unwrap();
        assert_eq!(t.ties, 2);
    }

    proptest! {
        #[test]
        fn tail_matches_rational_oracle(n in 1usize..120, m_frac in 0.0f64..1.0) {
            let m = (m_frac * n as f64).round() as usize;
            prop_assert!((binomial_upper_tail(n, m) - exact_tail(n, m)).abs() < 1e-12);
        }

        #[test]
        fn sign_test_symmetric(pairs in prop::collection::vec((0u8..4, 0u8..4), 1..15)) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.iter().map(|&(x, y)| (x as f64, y as f64)).unzip();
            prop_assert_eq!(sign_test(&a, &b).map(|t| t.p_value), sign_test(&b, &a).map(|t| t.p_value));
        }

        #[test]
        fn friedman_rank_invariance(
            table in prop::collection::vec(prop::collection::vec(0u8..5, 4), 3),
            shift in -10.0f64..10.0,
            which in 0usize..4,
        ) {
            let losses: Vec<Vec<f64>> = table.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let base = friedman_test(&losses).unwrap().statistic;
            let mut shifted = losses.clone();
            for row in shifted.iter_mut() {
                row[which] += shift;
            }
            prop_assert!((friedman_test(&shifted).unwrap().statistic - base).abs() < 1e-9);
            let mut permuted = losses.clone();
            permuted.rotate_left(1);
            prop_assert!((friedman_test(&permuted).unwrap().statistic - base).abs() < 1e-9);
        }
    }

    fn row(d: &str, s: &str, fold: usize, value: f64) -> ResultRow {
        ResultRow { dataset: d.into(), strategy: s.into(), fold, metric: "accuracy".into(), value }
    }

    #[test]
    fn summary_drops_nan_datasets() {
        let result = ExperimentResult {
            rows: vec![
                row("d1", "a", 0, 0.9),
                row("d1", "a", 1, 0.7),
                row("d1", "b", 0, 0.5),
                row("d1", "b", 1, 0.5),
                row("d2", "a", 0, 1.0),
                row("d2", "b", 0, 0.2),
                row("d3", "a", 0, f64::NAN),
                row("d3", "b", 0, 0.9),
            ],
        };
        let s = rank_summary(&result, "accuracy").unwrap();
        assert_eq!(s.pivot.datasets, vec!["d1".to_string(), "d2".to_string()]);
        assert_eq!(s.pivot.flagged, vec!["d3".to_string()]);
        assert_eq!(s.mean_ranks, vec![1.0, 2.0]);
        assert!((s.pivot.losses[0][0] - 0.2).abs() < 1e-12);
        assert_eq!(s.pairs[0].test.as_ref().unwrap().wins_a, 2);
        let text = s.to_string();
        assert!(text.contains("excluded (failed runs): d3"));
        let missing = ExperimentResult { rows: vec![row("d1", "a", 0, 0.5), row("d2", "b", 0, 0.5)] };
        assert!(matches!(rank_summary(&missing, "accuracy"), Err(Error::IncompletePivot(_))));
    }
}
