//! Combinatorial lemmas used by the decomposition pipeline: the row-ℓ1 bound
//! on block complexity, the subtract-the-average norm drop, and the greedy
//! column partition with its harmonic density guarantee.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::blocky::{BlockyMatrix, Rectangle, Sign, SignedBlockySum};
use crate::error::{input, Result};
use crate::matrix::IntMatrix;

/// Writes an integer matrix as a signed sum of blocky matrices with at most
/// `2 · max_x Σ_y |A(x,y)|` terms (`max_x Σ_y A(x,y)` when `A ≥ 0`).
///
/// Each round picks, for every nonzero row, its first nonzero column; rows
/// that picked the same column form one rectangle `S × {y}`. The positive
/// part is peeled off with `+` terms, then the negative part with `−` terms.
pub fn greedy_l1_decompose(a: &IntMatrix) -> SignedBlockySum {
    let (pos, neg) = a.split_signs();
    let mut sum = SignedBlockySum::new(a.shape());
    peel_nonnegative(pos, Sign::Plus, &mut sum);
    peel_nonnegative(neg, Sign::Minus, &mut sum);
    sum
}

fn peel_nonnegative(mut a: IntMatrix, sign: Sign, out: &mut SignedBlockySum) {
    let (m, n) = a.shape();
    loop {
        let mut by_col: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..m {
            if let Some(y) = (0..n).find(|&y| a.get(x, y) != 0) {
                by_col.entry(y).or_default().push(x);
            }
        }
        if by_col.is_empty() {
            return;
        }
        let mut rects = Vec::with_capacity(by_col.len());
        for (y, rows) in by_col {
            for &x in &rows {
                a.set(x, y, a.get(x, y) - 1);
            }
            rects.push(Rectangle::new(rows, vec![y]).expect("nonempty"));
        }
        let term = BlockyMatrix::new((m, n), rects).expect("one column per rectangle, rows pick one column each");
        out.push(sign, term).expect("same shape");
    }
}

/// Result of subtracting the average from a family of vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AverageSplit {
    pub average: Vec<f64>,
    /// `c = ‖v̂‖`.
    pub norm_of_average: f64,
    /// Indices with `‖v_i − v̂‖² ≤ ‖v_i‖² − c²/2`.
    pub kept: Vec<usize>,
    /// `‖v_i‖² − ‖v_i − v̂‖²` for every index.
    pub drops: Vec<f64>,
    /// `c² r / (2γ²)`.
    pub size_bound: f64,
}

const MEMBERSHIP_SLACK: f64 = 1e-12;

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Averages `vectors`, then keeps the indices whose squared norm drops by at
/// least `c²/2` when the average is subtracted. Requires `‖v_i‖ ≤ γ`.
pub fn subtract_average<V: AsRef<[f64]>>(vectors: &[V], gamma: f64) -> Result<AverageSplit> {
    let r = vectors.len();
    if r == 0 {
        return input("subtract_average needs at least one vector");
    }
    let dim = vectors[0].as_ref().len();
    if vectors.iter().any(|v| v.as_ref().len() != dim) {
        return input("vectors have different dimensions");
    }
    if gamma.is_nan() || gamma <= 0.0 {
        return input(format!("norm budget must be positive, got {gamma}"));
    }
    for (i, v) in vectors.iter().enumerate() {
        let nv = norm_sq(v.as_ref()).sqrt();
        if nv > gamma + 1e-9 {
            return input(format!("vector {i} has norm {nv} > budget {gamma}"));
        }
    }
    let mut average = vec![0.0; dim];
    for v in vectors {
        for (acc, x) in average.iter_mut().zip(v.as_ref()) {
            *acc += x;
        }
    }
    average.iter_mut().for_each(|x| *x /= r as f64);
    let c2 = norm_sq(&average);
    let drops: Vec<f64> = vectors
        .iter()
        .map(|v| {
            let v = v.as_ref();
            let diff: f64 = v.iter().zip(&average).map(|(x, m)| (x - m) * (x - m)).sum();
            norm_sq(v) - diff
        })
        .collect();
    let kept: Vec<usize> = (0..r).filter(|&i| drops[i] + MEMBERSHIP_SLACK >= c2 / 2.0).collect();
    let size_bound = c2 * r as f64 / (2.0 * gamma * gamma);
    assert!(
        kept.len() as f64 >= size_bound - 1e-9 * r as f64,
        "kept {} of {r} vectors, below the guaranteed {size_bound}",
        kept.len()
    );
    Ok(AverageSplit {
        average,
        norm_of_average: c2.sqrt(),
        kept,
        drops,
        size_bound,
    })
}

/// One class of a [`GreedyPartition`]: columns on which row `row` is
/// constantly `value`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionClass {
    pub columns: Vec<usize>,
    pub row: usize,
    pub value: i64,
}

/// Column partition produced by the greedy algorithm, in creation order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyPartition {
    pub classes: Vec<PartitionClass>,
    /// Number of partitioned columns, `|Y|`.
    pub column_count: usize,
}

/// Greedy partition of all columns. Every column must contain a nonzero.
pub fn greedy_partition(a: &IntMatrix) -> Result<GreedyPartition> {
    greedy_partition_on(a, &(0..a.cols()).collect::<Vec<_>>())
}

/// Greedy partition of the listed columns of `a`.
///
/// Each step picks `(x, b)` with `b ≠ 0` maximizing `|{y ∈ R : A(x,y) = b}|`
/// over the remaining columns `R`; ties go to the smallest row, then the
/// smallest `|b|`, then negative `b`.
pub fn greedy_partition_on(a: &IntMatrix, cols: &[usize]) -> Result<GreedyPartition> {
    if let Some(&c) = cols.iter().find(|&&c| a.is_zero_column(c)) {
        return input(format!("column {c} is all zero; strip zero columns before partitioning"));
    }
    let mut remaining: Vec<usize> = cols.to_vec();
    let mut classes = Vec::new();
    let value_key = |b: i64| (b.abs(), b > 0);
    while !remaining.is_empty() {
        let mut best: Option<(usize, usize, i64)> = None; // (count, row, value)
        for x in 0..a.rows() {
            let mut counts: HashMap<i64, usize> = HashMap::new();
            for &y in &remaining {
                let v = a.get(x, y);
                if v != 0 {
                    *counts.entry(v).or_default() += 1;
                }
            }
            let row_best = counts
                .into_iter()
                .max_by(|(b1, c1), (b2, c2)| c1.cmp(c2).then_with(|| value_key(*b2).cmp(&value_key(*b1))));
            if let Some((b, count)) = row_best {
                if best.is_none_or(|(bc, _, _)| count > bc) {
                    best = Some((count, x, b));
                }
            }
        }
        let (_, row, value) = best.expect("remaining columns have a nonzero entry");
        let (class, rest): (Vec<usize>, Vec<usize>) = remaining.iter().partition(|&&y| a.get(row, y) == value);
        classes.push(PartitionClass {
            columns: class,
            row,
            value,
        });
        remaining = rest;
    }
    Ok(GreedyPartition {
        classes,
        column_count: cols.len(),
    })
}

impl GreedyPartition {
    /// `Pr_{y ∈ S_i}[A(x,y) = b]` for class `i`.
    pub fn density(&self, a: &IntMatrix, class: usize, x: usize, b: i64) -> f64 {
        let cols = &self.classes[class].columns;
        cols.iter().filter(|&&y| a.get(x, y) == b).count() as f64 / cols.len() as f64
    }

    /// Number of classes in which row `x` takes value `b` with density ≥ δ.
    pub fn dense_class_count(&self, a: &IntMatrix, x: usize, b: i64, delta: f64) -> usize {
        (0..self.classes.len()).filter(|&i| self.density(a, i, x, b) >= delta).count()
    }

    /// `Σ_i Pr_{y ∈ S_i}[A(x,y) = b]`.
    pub fn harmonic_sum(&self, a: &IntMatrix, x: usize, b: i64) -> f64 {
        (0..self.classes.len()).map(|i| self.density(a, i, x, b)).sum()
    }

    /// `ln|Y| + 1`.
    pub fn harmonic_bound(&self) -> f64 {
        (self.column_count.max(1) as f64).ln() + 1.0
    }

    /// Every `(x, b ≠ 0)` pair occurring on the partitioned columns.
    pub fn value_pairs(&self, a: &IntMatrix) -> Vec<(usize, i64)> {
        let mut pairs: Vec<(usize, i64)> = Vec::new();
        for x in 0..a.rows() {
            let mut vals: Vec<i64> = self
                .classes
                .iter()
                .flat_map(|c| c.columns.iter().map(move |&y| a.get(x, y)))
                .filter(|&v| v != 0)
                .collect();
            vals.sort_unstable();
            vals.dedup();
            pairs.extend(vals.into_iter().map(|b| (x, b)));
        }
        pairs
    }

    /// Largest harmonic sum over all `(x, b)` pairs.
    pub fn max_harmonic_sum(&self, a: &IntMatrix) -> f64 {
        self.value_pairs(a)
            .into_iter()
            .map(|(x, b)| self.harmonic_sum(a, x, b))
            .fold(0.0, f64::max)
    }

    /// Checks that for every δ in `deltas` and every `(x, b)`, at most
    /// `(ln|Y| + 1)/δ` classes are δ-dense. Returns the first violation.
    pub fn check_density_bound(&self, a: &IntMatrix, deltas: &[f64]) -> Option<DensityViolation> {
        let bound = self.harmonic_bound();
        for (x, b) in self.value_pairs(a) {
            for &delta in deltas {
                let count = self.dense_class_count(a, x, b, delta);
                if count as f64 > bound / delta + 1e-9 {
                    return Some(DensityViolation {
                        row: x,
                        value: b,
                        delta,
                        count,
                        limit: bound / delta,
                    });
                }
            }
        }
        None
    }

    /// Density table rows `(x, b, δ, count, limit)` for reporting.
    pub fn density_table(&self, a: &IntMatrix, deltas: &[f64]) -> Vec<DensityRow> {
        let bound = self.harmonic_bound();
        let mut out = Vec::new();
        for (x, b) in self.value_pairs(a) {
            for &delta in deltas {
                out.push(DensityRow {
                    row: x,
                    value: b,
                    delta,
                    count: self.dense_class_count(a, x, b, delta),
                    limit: bound / delta,
                });
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub row: usize,
    pub value: i64,
    pub delta: f64,
    pub count: usize,
    pub limit: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityViolation {
    pub row: usize,
    pub value: i64,
    pub delta: f64,
    pub count: usize,
    pub limit: f64,
}

/// δ grid on which the density guarantee is checked.
pub const DELTA_GRID: [f64; 4] = [0.5, 0.25, 0.1, 0.05];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocky::is_blocky;

    #[test]
    fn l1_decompose_examples() {
        let d = greedy_l1_decompose(&IntMatrix::from_rows(&[[2]]));
        assert_eq!(d.len(), 2);
        assert!(d.terms().iter().all(|t| t.blocky.to_matrix() == IntMatrix::ones(1, 1)));

        let a = IntMatrix::from_rows(&[[1, 1], [0, 1]]);
        let d = greedy_l1_decompose(&a);
        assert_eq!(d.len(), 2);
        assert_eq!(d.evaluate(), a);
        assert_eq!(d.terms()[0].blocky.to_matrix(), IntMatrix::identity(2));

        let a = IntMatrix::from_rows(&[[1, -1]]);
        let d = greedy_l1_decompose(&a);
        assert_eq!(d.len(), 2);
        assert_eq!(d.evaluate(), a);
        assert_eq!(d.terms()[1].sign, Sign::Minus);
    }

    #[test]
    fn l1_terms_are_blocky() {
        let a = IntMatrix::from_rows(&[[3, -1, 0], [0, 2, 2], [1, 1, -2]]);
        let d = greedy_l1_decompose(&a);
        assert_eq!(d.evaluate(), a);
        assert!(d.len() as i64 <= 2 * a.max_row_l1());
        for t in d.terms() {
            assert!(is_blocky(&t.blocky.to_matrix()).unwrap().is_blocky());
        }
    }

    #[test]
    fn subtract_average_identical_vectors() {
        let s = subtract_average(&[[1.0, 0.0], [1.0, 0.0]], 1.0).unwrap();
        assert_eq!(s.average, vec![1.0, 0.0]);
        assert_eq!(s.norm_of_average, 1.0);
        assert_eq!(s.kept, vec![0, 1]);
        assert_eq!(s.drops, vec![1.0, 1.0]);
    }

    #[test]
    fn subtract_average_orthogonal_vectors() {
        let s = subtract_average(&[[1.0, 0.0], [0.0, 1.0]], 1.0).unwrap();
        assert!((s.norm_of_average.powi(2) - 0.5).abs() < 1e-15);
        assert_eq!(s.kept, vec![0, 1]);
        assert!(s.drops.iter().all(|&d| (d - 0.5).abs() < 1e-15));
        assert!((s.size_bound - 0.5).abs() < 1e-15);
    }

    #[test]
    fn subtract_average_cancelling_vectors() {
        let s = subtract_average(&[[1.0, 0.0], [-1.0, 0.0]], 1.0).unwrap();
        assert_eq!(s.norm_of_average, 0.0);
        assert_eq!(s.kept, vec![0, 1]);
        assert_eq!(s.size_bound, 0.0);
    }

    #[test]
    fn subtract_average_rejects_over_budget() {
        assert!(subtract_average(&[[2.0, 0.0]], 1.0).is_err());
        assert!(subtract_average::<[f64; 1]>(&[], 1.0).is_err());
    }

    #[test]
    fn greedy_partition_examples() {
        let a = IntMatrix::from_rows(&[[1, 1, 0], [0, 0, 2]]);
        let p = greedy_partition(&a).unwrap();
        assert_eq!(
            p.classes,
            vec![
                PartitionClass { columns: vec![0, 1], row: 0, value: 1 },
                PartitionClass { columns: vec![2], row: 1, value: 2 },
            ]
        );

        let p = greedy_partition(&IntMatrix::ones(3, 4)).unwrap();
        assert_eq!(p.classes.len(), 1);
        assert_eq!(p.classes[0].columns, vec![0, 1, 2, 3]);

        let p = greedy_partition(&IntMatrix::identity(3)).unwrap();
        assert_eq!(p.classes.len(), 3);
        for (i, c) in p.classes.iter().enumerate() {
            assert_eq!((c.columns.clone(), c.row, c.value), (vec![i], i, 1));
        }
    }

    #[test]
    fn greedy_partition_value_tie_break() {
        // Row 0 has -1 and +1 twice each: the negative value wins the tie.
        let a = IntMatrix::from_rows(&[[1, -1, 1, -1]]);
        let p = greedy_partition(&a).unwrap();
        assert_eq!(p.classes[0].value, -1);
        // Smaller |b| beats larger |b| on equal counts.
        let a = IntMatrix::from_rows(&[[2, 2, -1, -1]]);
        assert_eq!(greedy_partition(&a).unwrap().classes[0].value, -1);
    }

    #[test]
    fn greedy_partition_rejects_zero_columns() {
        assert!(greedy_partition(&IntMatrix::from_rows(&[[1, 0]])).is_err());
    }
}
