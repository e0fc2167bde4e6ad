use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::oracle::exact_block_complexity;
use super::{decompose, DecomposeConfig};
use crate::error::{input, Result};
use crate::matrix::IntMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentMode {
    /// Exact oracle values, `n ≤ 4`.
    Exact,
    /// Pipeline term counts, which are upper bounds.
    Pipeline,
}

/// Block complexities of uniform random boolean `n × n` matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LowerBoundReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub mode: ExperimentMode,
    /// False for pipeline mode, whose values only bound the complexity from
    /// above.
    pub exact: bool,
    /// One value per trial; `None` when the oracle depth was exceeded.
    pub values: Vec<Option<usize>>,
    /// `(value, count)` pairs in increasing value order.
    pub histogram: Vec<(usize, usize)>,
    pub exceeded: usize,
    pub min: Option<usize>,
    pub median: Option<usize>,
    pub max: Option<usize>,
    /// `n / (4 log₂(2n))`
    pub reference: f64,
}

pub fn reference_bound(n: usize) -> f64 {
    n as f64 / (4.0 * (2.0 * n as f64).log2())
}

fn oracle_depth(n: usize) -> usize {
    if n <= 3 {
        6
    } else {
        4
    }
}

pub fn random_lower_bound_experiment(n: usize, trials: usize, seed: u64, mode: ExperimentMode) -> Result<LowerBoundReport> {
    if n == 0 {
        return input("matrix size must be positive");
    }
    if mode == ExperimentMode::Exact && n > 4 {
        return input(format!("exact mode supports n ≤ 4, got {n}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(trials);
    for _ in 0..trials {
        let data: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..=1)).collect();
        let a = IntMatrix::new(n, n, data)?;
        let v = match mode {
            ExperimentMode::Exact => exact_block_complexity(&a, oracle_depth(n))?.value(),
            ExperimentMode::Pipeline => Some(decompose(&a, None, &DecomposeConfig::default())?.0.len()),
        };
        values.push(v);
    }
    let mut sorted: Vec<usize> = values.iter().flatten().copied().collect();
    sorted.sort_unstable();
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in &sorted {
        *hist.entry(v).or_default() += 1;
    }
    Ok(LowerBoundReport {
        n,
        trials,
        seed,
        mode,
        exact: mode == ExperimentMode::Exact,
        exceeded: values.iter().filter(|v| v.is_none()).count(),
        values,
        histogram: hist.into_iter().collect(),
        min: sorted.first().copied(),
        median: sorted.get(sorted.len() / 2).copied(),
        max: sorted.last().copied(),
        reference: reference_bound(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_arithmetic() {
        assert!((reference_bound(3) - 3.0 / (4.0 * 6f64.log2())).abs() < 1e-15);
        assert!((reference_bound(3) - 0.29).abs() < 0.01);
    }

    #[test]
    fn one_by_one_values() {
        let r = random_lower_bound_experiment(1, 20, 3, ExperimentMode::Exact).unwrap();
        assert!(r.values.iter().all(|v| matches!(v, Some(0) | Some(1))));
        assert_eq!(r.histogram.iter().map(|(_, c)| c).sum::<usize>(), 20);
    }

    #[test]
    fn exact_mode_is_capped() {
        assert!(random_lower_bound_experiment(5, 1, 0, ExperimentMode::Exact).is_err());
    }
}
