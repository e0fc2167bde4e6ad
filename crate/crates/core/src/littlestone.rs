//! Exact Littlestone and α-weighted Littlestone dimensions, shattered-tree
//! witnesses, and the two column-stabilization procedures built on them.
//!
//! Both dimensions are computed by the same memoized recursion over column
//! subsets: `L(S) = max over admissible splits (S⁻, S⁺) of 1 + min(L(S⁻), L(S⁺))`,
//! with `L(S) = 0` when no split has both sides nonempty. Identical columns are
//! merged first (shattering only sees distinct column vectors), subsets are
//! bitsets over the distinct columns, and `L(S) ≤ ⌊log₂|S|⌋` prunes the search.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::matrix::{IntMatrix, RealMatrix};

/// Default cap on node expansions for the exact recursions.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

type Bits = Box<[u64]>;

fn bits_empty(words: usize) -> Bits {
    vec![0u64; words].into_boxed_slice()
}

fn bits_count(b: &[u64]) -> u32 {
    b.iter().map(|w| w.count_ones()).sum()
}

fn bits_and(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bits_set(b: &mut [u64], i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn floor_log2(n: u32) -> u32 {
    if n == 0 {
        0
    } else {
        31 - n.leading_zeros()
    }
}

/// A candidate split of the column universe: columns going left and right at
/// a node labelled `row` with threshold `threshold`.
#[derive(Clone, Debug)]
struct Split {
    row: usize,
    threshold: f64,
    left: Bits,
    right: Bits,
}

/// How splits are generated from a row.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Mode {
    /// Sign matrices: left = {-1}, right = {+1}.
    Sign,
    /// Real matrices: left = {A ≥ w + α/2}, right = {A ≤ w − α/2}.
    Alpha(f64),
}

/// Memoized shattering search over one matrix.
pub(crate) struct ShatterSearch {
    words: usize,
    /// original column -> distinct column id
    col_class: Vec<usize>,
    splits: Vec<Split>,
    memo: HashMap<Bits, u32>,
    expansions: u64,
    budget: u64,
    mode: Mode,
}

impl ShatterSearch {
    fn new(a: &RealMatrix, mode: Mode, budget: u64) -> Self {
        let (m, n) = a.shape();
        // Merge identical columns.
        let mut col_class = Vec::with_capacity(n);
        let mut reps: Vec<usize> = Vec::new();
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
        for c in 0..n {
            let key: Vec<u64> = (0..m).map(|r| a.get(r, c).to_bits()).collect();
            let id = *seen.entry(key).or_insert_with(|| {
                reps.push(c);
                reps.len() - 1
            });
            col_class.push(id);
        }
        let distinct = reps.len();
        let words = distinct.div_ceil(64).max(1);

        let mut splits = Vec::new();
        let mut seen_splits: HashSet<(Bits, Bits)> = HashSet::new();
        let mut push = |row: usize, threshold: f64, left: Bits, right: Bits| {
            if bits_count(&left) == 0 || bits_count(&right) == 0 {
                return;
            }
            if seen_splits.insert((left.clone(), right.clone())) {
                splits.push(Split {
                    row,
                    threshold,
                    left,
                    right,
                });
            }
        };
        for r in 0..m {
            let vals: Vec<f64> = reps.iter().map(|&c| a.get(r, c)).collect();
            match mode {
                Mode::Sign => {
                    let mut left = bits_empty(words);
                    let mut right = bits_empty(words);
                    for (k, &v) in vals.iter().enumerate() {
                        if v < 0.0 {
                            bits_set(&mut left, k);
                        } else {
                            bits_set(&mut right, k);
                        }
                    }
                    push(r, 0.0, left, right);
                }
                Mode::Alpha(alpha) => {
                    let mut pivots = vals.clone();
                    pivots.sort_by(f64::total_cmp);
                    pivots.dedup();
                    for &a0 in &pivots {
                        // w = a0 + α/2: right = {A ≤ a0}, left = {A ≥ a0 + α}
                        // w = a0 − α/2: left = {A ≥ a0}, right = {A ≤ a0 − α}
                        for (w, lo, hi) in [(a0 + alpha / 2.0, a0 + alpha, a0), (a0 - alpha / 2.0, a0, a0 - alpha)] {
                            let mut left = bits_empty(words);
                            let mut right = bits_empty(words);
                            for (k, &v) in vals.iter().enumerate() {
                                if v >= lo {
                                    bits_set(&mut left, k);
                                } else if v <= hi {
                                    bits_set(&mut right, k);
                                }
                            }
                            push(r, w, left, right);
                        }
                    }
                }
            }
        }
        Self {
            words,
            col_class,
            splits,
            memo: HashMap::new(),
            expansions: 0,
            budget,
            mode,
        }
    }

    fn full(&self) -> Bits {
        self.subset(0..self.col_class.len())
    }

    /// Bitset of distinct columns hit by the given original columns.
    fn subset(&self, cols: impl IntoIterator<Item = usize>) -> Bits {
        let mut b = bits_empty(self.words);
        for c in cols {
            bits_set(&mut b, self.col_class[c]);
        }
        b
    }

    fn candidate_splits(&self, s: &[u64]) -> Vec<(usize, Bits, Bits)> {
        let mut seen: HashSet<(Bits, Bits)> = HashSet::new();
        let mut out = Vec::new();
        for (k, sp) in self.splits.iter().enumerate() {
            let l = bits_and(s, &sp.left);
            if bits_count(&l) == 0 {
                continue;
            }
            let r = bits_and(s, &sp.right);
            if bits_count(&r) == 0 {
                continue;
            }
            if seen.insert((l.clone(), r.clone())) {
                out.push((k, l, r));
            }
        }
        // Most balanced splits first: they are the ones that can reach deep.
        out.sort_by_key(|(_, l, r)| std::cmp::Reverse(bits_count(l).min(bits_count(r))));
        out
    }

    fn dim(&mut self, s: &[u64]) -> Result<u32> {
        if let Some(&d) = self.memo.get(s) {
            return Ok(d);
        }
        self.expansions += 1;
        if self.expansions > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        let ub = floor_log2(bits_count(s));
        let mut best = 0;
        if ub > 0 {
            for (_, l, r) in self.candidate_splits(s) {
                let (small, large) = if bits_count(&l) <= bits_count(&r) { (l, r) } else { (r, l) };
                if floor_log2(bits_count(&small)) < best {
                    continue;
                }
                let a = self.dim(&small)?;
                if a < best {
                    continue;
                }
                let b = self.dim(&large)?;
                best = best.max(1 + a.min(b));
                if best == ub {
                    break;
                }
            }
        }
        self.memo.insert(s.into(), best);
        Ok(best)
    }

    fn dim_of_cols(&mut self, cols: &[usize]) -> Result<u32> {
        let s = self.subset(cols.iter().copied());
        self.dim(&s)
    }

    /// Builds a complete tree of the given depth shattered by subset `s`.
    fn build_tree(&mut self, s: &[u64], depth: u32, nodes: &mut Vec<TreeNode>) -> Result<Option<usize>> {
        if depth == 0 {
            return Ok(None);
        }
        for (k, l, r) in self.candidate_splits(s) {
            if self.dim(&l)? + 1 >= depth && self.dim(&r)? + 1 >= depth {
                let idx = nodes.len();
                let sp = &self.splits[k];
                nodes.push(TreeNode {
                    row: sp.row,
                    threshold: sp.threshold,
                    left: None,
                    right: None,
                });
                let left = self.build_tree(&l, depth - 1, nodes)?;
                let right = self.build_tree(&r, depth - 1, nodes)?;
                nodes[idx].left = left;
                nodes[idx].right = right;
                return Ok(Some(idx));
            }
        }
        unreachable!("subset with dimension >= {depth} has a deep enough split")
    }

    fn witness(&mut self) -> Result<MistakeTree> {
        let full = self.full();
        let depth = self.dim(&full)?;
        let mut nodes = Vec::new();
        self.build_tree(&full, depth, &mut nodes)?;
        let alpha = match self.mode {
            Mode::Sign => None,
            Mode::Alpha(a) => Some(a),
        };
        Ok(MistakeTree { depth, alpha, nodes })
    }
}

/// A complete binary mistake tree, stored as its internal nodes in preorder.
///
/// For sign trees (`alpha == None`) the left edge carries −1 and the right
/// edge +1. For weighted trees the left child requires `A(x, y) ≥ w + α/2`
/// and the right child `A(x, y) ≤ w − α/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MistakeTree {
    pub depth: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub nodes: Vec<TreeNode>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    #[serde(rename = "rowLabel")]
    pub row: usize,
    pub threshold: f64,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

/// Alias kept for readability at call sites dealing with thresholds.
pub type WeightedMistakeTree = MistakeTree;

impl MistakeTree {
    /// Checks by enumeration that every root-to-leaf path is realized by some
    /// column of `a`.
    pub fn is_shattered_by(&self, a: &RealMatrix) -> bool {
        if self.depth == 0 {
            return a.cols() > 0;
        }
        if self.nodes.is_empty() {
            return false;
        }
        let cols: Vec<usize> = (0..a.cols()).collect();
        self.check(a, 0, self.depth, &cols)
    }

    fn check(&self, a: &RealMatrix, node: usize, depth: u32, cols: &[usize]) -> bool {
        if depth == 0 {
            return !cols.is_empty();
        }
        let nd = &self.nodes[node];
        // (goes left, goes right)
        let side = |v: f64| match self.alpha {
            None => (v == -1.0, v == 1.0),
            Some(alpha) => (v >= nd.threshold + alpha / 2.0 - 1e-12, v <= nd.threshold - alpha / 2.0 + 1e-12),
        };
        let left: Vec<usize> = cols.iter().copied().filter(|&c| side(a.get(nd.row, c)).0).collect();
        let right: Vec<usize> = cols.iter().copied().filter(|&c| side(a.get(nd.row, c)).1).collect();
        let sub = |child: Option<usize>, set: &[usize]| match child {
            Some(ch) => self.check(a, ch, depth - 1, set),
            None => depth == 1 && !set.is_empty(),
        };
        sub(nd.left, &left) && sub(nd.right, &right)
    }
}

/// Exact Littlestone dimension of a ±1 matrix.
pub fn ldim(a: &IntMatrix) -> Result<u32> {
    ldim_with_budget(a, DEFAULT_BUDGET)
}

pub fn ldim_with_budget(a: &IntMatrix, budget: u64) -> Result<u32> {
    let mut search = sign_search(a, budget)?;
    let full = search.full();
    search.dim(&full)
}

/// Littlestone dimension together with a shattered tree of that depth.
pub fn ldim_witness(a: &IntMatrix, budget: u64) -> Result<MistakeTree> {
    sign_search(a, budget)?.witness()
}

fn sign_search(a: &IntMatrix, budget: u64) -> Result<ShatterSearch> {
    a.check_sign()?;
    if a.cols() == 0 {
        return input("Littlestone dimension needs at least one column");
    }
    Ok(ShatterSearch::new(&a.to_real(), Mode::Sign, budget))
}

/// Exact α-weighted Littlestone dimension.
pub fn ldim_alpha(a: &RealMatrix, alpha: f64) -> Result<u32> {
    ldim_alpha_with_budget(a, alpha, DEFAULT_BUDGET)
}

pub fn ldim_alpha_with_budget(a: &RealMatrix, alpha: f64, budget: u64) -> Result<u32> {
    let mut search = alpha_search(a, alpha, budget)?;
    let full = search.full();
    search.dim(&full)
}

pub fn ldim_alpha_witness(a: &RealMatrix, alpha: f64, budget: u64) -> Result<WeightedMistakeTree> {
    alpha_search(a, alpha, budget)?.witness()
}

fn alpha_search(a: &RealMatrix, alpha: f64, budget: u64) -> Result<ShatterSearch> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return input(format!("alpha must be positive, got {alpha}"));
    }
    if a.cols() == 0 {
        return input("Littlestone dimension needs at least one column");
    }
    Ok(ShatterSearch::new(a, Mode::Alpha(alpha), budget))
}

/// Per-row function returned by a stabilizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RowFunction {
    Signs(Vec<i64>),
    Values(Vec<f64>),
}

/// Column subset plus row function on which every row is nearly constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilizationResult {
    /// Retained columns, sorted.
    pub columns: Vec<usize>,
    pub row_function: RowFunction,
    /// Per-row fraction of retained columns that violate the row function.
    pub violation_rates: Vec<f64>,
    /// Dimension of the input, when computed.
    pub dimension: Option<u32>,
    /// Guaranteed lower bound on `|S|` (needs `dimension`).
    pub size_bound: Option<f64>,
    /// True when every recursion step used exact dimensions, so the size bound
    /// is backed by the argument and not just by counting.
    pub certified: bool,
}

impl StabilizationResult {
    pub fn max_violation(&self) -> f64 {
        self.violation_rates.iter().fold(0.0, |m, &v| m.max(v))
    }
}

/// Sign-matrix stabilization: shrink the columns until every row agrees
/// with its majority sign on all but an `eps` fraction.
pub fn majority_stabilize(a: &IntMatrix, eps: f64) -> Result<StabilizationResult> {
    majority_stabilize_with_budget(a, eps, DEFAULT_BUDGET)
}

pub fn majority_stabilize_with_budget(a: &IntMatrix, eps: f64, budget: u64) -> Result<StabilizationResult> {
    if !(eps > 0.0 && eps < 0.5) {
        return input(format!("eps must lie in (0, 1/2), got {eps}"));
    }
    let mut search = sign_search(a, budget)?;
    let (m, n) = a.shape();
    let d = search.dim_of_cols(&(0..n).collect::<Vec<_>>())?;
    let mut cols: Vec<usize> = (0..n).collect();
    loop {
        let signs: Vec<i64> = (0..m)
            .map(|x| {
                let s: i64 = cols.iter().map(|&y| a.get(x, y)).sum();
                if s >= 0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        let rates: Vec<f64> = (0..m)
            .map(|x| {
                let bad = cols.iter().filter(|&&y| a.get(x, y) != signs[x]).count();
                bad as f64 / cols.len() as f64
            })
            .collect();
        let Some(x) = rates.iter().position(|&r| r > eps) else {
            let size_bound = eps.powi(d as i32) * n as f64;
            return Ok(StabilizationResult {
                columns: cols,
                row_function: RowFunction::Signs(signs),
                violation_rates: rates,
                dimension: Some(d),
                size_bound: Some(size_bound),
                certified: true,
            });
        };
        let (minus, plus): (Vec<usize>, Vec<usize>) = cols.iter().partition(|&&y| a.get(x, y) == -1);
        let dm = search.dim_of_cols(&minus)?;
        let dp = search.dim_of_cols(&plus)?;
        cols = match dm.cmp(&dp) {
            std::cmp::Ordering::Less => minus,
            std::cmp::Ordering::Greater => plus,
            std::cmp::Ordering::Equal if minus.len() >= plus.len() => minus,
            std::cmp::Ordering::Equal => plus,
        };
    }
}

/// Options for [`bucket_stabilize_with`].
#[derive(Clone, Debug)]
pub struct StabilizeOptions {
    pub budget: u64,
    /// Compute `Ldim_α` of the whole input so the size bound can be reported.
    pub compute_bound: bool,
}

impl Default for StabilizeOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            compute_bound: true,
        }
    }
}

pub fn bucket_stabilize(a: &RealMatrix, alpha: f64, eps: f64) -> Result<StabilizationResult> {
    bucket_stabilize_with(a, alpha, eps, &StabilizeOptions::default())
}

/// Real-matrix stabilization on an α-grid of buckets: find columns `S` and
/// `g: X → [−M, M]` with `Pr_{y∈S}[|A(x,y) − g(x)| ≥ 2α] ≤ eps` for every row.
///
/// Buckets are half-open, `[−M + (i−1)α, −M + iα)` for `i = 1..=K` with
/// `K = ⌈2M/α⌉` (the top bucket also holds `M`). A row is settled when four
/// consecutive buckets hold at least `(1 − eps)|S|` columns; `g(x)` is then
/// the midpoint of the range of values captured by that window.
pub fn bucket_stabilize_with(
    a: &RealMatrix,
    alpha: f64,
    eps: f64,
    opts: &StabilizeOptions,
) -> Result<StabilizationResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return input(format!("alpha must be positive, got {alpha}"));
    }
    if !(0.0..1.0).contains(&eps) {
        return input(format!("eps must lie in [0, 1), got {eps}"));
    }
    let (m, n) = a.shape();
    if n == 0 {
        return input("stabilization needs at least one column");
    }
    let big_m = a.max_abs();
    let k_buckets = ((2.0 * big_m / alpha).ceil() as usize).max(1);
    let bucket = |v: f64| -> usize {
        let i = ((v + big_m) / alpha).floor() as i64 + 1;
        i.clamp(1, k_buckets as i64) as usize
    };

    let mut search: Option<ShatterSearch> = None;
    let mut certified = true;
    let mut dimension = None;
    if opts.compute_bound {
        let s = search.get_or_insert_with(|| ShatterSearch::new(a, Mode::Alpha(alpha), opts.budget));
        match s.dim_of_cols(&(0..n).collect::<Vec<_>>()) {
            Ok(d) => dimension = Some(d),
            Err(Error::BudgetExceeded { .. }) => certified = false,
            Err(e) => return Err(e),
        }
    }

    let mut cols: Vec<usize> = (0..n).collect();
    loop {
        let need = (1.0 - eps) * cols.len() as f64 - 1e-9;
        let mut g = vec![0.0; m];
        let mut failing = None;
        let mut counts = vec![0usize; k_buckets + 1];
        for x in 0..m {
            counts.iter_mut().for_each(|c| *c = 0);
            for &y in &cols {
                counts[bucket(a.get(x, y))] += 1;
            }
            let start = (1..=k_buckets).find(|&s| {
                let hi = (s + 3).min(k_buckets);
                (counts[s..=hi].iter().sum::<usize>() as f64) >= need
            });
            match start {
                Some(s) => {
                    let hi = (s + 3).min(k_buckets);
                    let (lo_v, hi_v) = cols
                        .iter()
                        .map(|&y| a.get(x, y))
                        .filter(|&v| (s..=hi).contains(&bucket(v)))
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                    g[x] = if lo_v.is_finite() { (lo_v + hi_v) / 2.0 } else { 0.0 };
                }
                None => {
                    failing = Some((x, counts.clone()));
                    break;
                }
            }
        }
        let Some((x, counts)) = failing else {
            let rates = (0..m)
                .map(|x| {
                    let bad = cols.iter().filter(|&&y| (a.get(x, y) - g[x]).abs() >= 2.0 * alpha).count();
                    bad as f64 / cols.len() as f64
                })
                .collect();
            let size_bound = dimension
                .filter(|_| certified)
                .map(|d| n as f64 * (eps / k_buckets as f64).powi(d as i32));
            return Ok(StabilizationResult {
                columns: cols,
                row_function: RowFunction::Values(g),
                violation_rates: rates,
                dimension,
                size_bound,
                certified: certified && dimension.is_some(),
            });
        };

        // Heaviest bucket i, then the heaviest bucket j outside i-1..=i+2.
        let i = (1..=k_buckets).fold(1, |best, b| if counts[b] > counts[best] { b } else { best });
        let j = (1..=k_buckets)
            .filter(|&b| b + 1 < i || b > i + 2)
            .fold(None, |best: Option<usize>, b| match best {
                Some(bb) if counts[bb] >= counts[b] => Some(bb),
                _ => Some(b),
            })
            .filter(|&b| counts[b] > 0)
            .expect("a failing row leaves mass outside the window");
        let part = |b: usize| -> Vec<usize> { cols.iter().copied().filter(|&y| bucket(a.get(x, y)) == b).collect() };
        let (si, sj) = (part(i), part(j));

        let s = search.get_or_insert_with(|| ShatterSearch::new(a, Mode::Alpha(alpha), opts.budget));
        let exact = if certified {
            match (s.dim_of_cols(&si), s.dim_of_cols(&sj)) {
                (Ok(di), Ok(dj)) => Some((di, dj)),
                (Err(Error::BudgetExceeded { .. }), _) | (_, Err(Error::BudgetExceeded { .. })) => None,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        } else {
            None
        };
        cols = match exact {
            Some((di, dj)) if dj < di => sj,
            Some(_) => si,
            None => {
                certified = false;
                if sj.len() > si.len() {
                    sj
                } else {
                    si
                }
            }
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute-force oracle straight from the definition, independent of the
    /// memoized search: try every row and every real threshold class.
    fn oracle_ldim(a: &RealMatrix, cols: &[usize], alpha: Option<f64>) -> u32 {
        let mut best = 0;
        for x in 0..a.rows() {
            let mut thresholds: Vec<f64> = match alpha {
                None => vec![0.0],
                Some(al) => cols.iter().flat_map(|&y| [a.get(x, y) + al / 2.0, a.get(x, y) - al / 2.0]).collect(),
            };
            thresholds.dedup();
            for w in thresholds {
                let (l, r): (Vec<usize>, Vec<usize>) = match alpha {
                    None => (
                        cols.iter().copied().filter(|&y| a.get(x, y) < 0.0).collect(),
                        cols.iter().copied().filter(|&y| a.get(x, y) > 0.0).collect(),
                    ),
                    Some(al) => (
                        cols.iter().copied().filter(|&y| a.get(x, y) >= w + al / 2.0 - 1e-12).collect(),
                        cols.iter().copied().filter(|&y| a.get(x, y) <= w - al / 2.0 + 1e-12).collect(),
                    ),
                };
                if !l.is_empty() && !r.is_empty() {
                    best = best.max(1 + oracle_ldim(a, &l, alpha).min(oracle_ldim(a, &r, alpha)));
                }
            }
        }
        best
    }

    fn all_patterns(d: usize) -> IntMatrix {
        let n = 1 << d;
        let mut m = IntMatrix::zeros(d, n);
        for c in 0..n {
            for r in 0..d {
                m.set(r, c, if (c >> r) & 1 == 1 { 1 } else { -1 });
            }
        }
        m
    }

    fn random_sign(rng: &mut ChaCha8Rng, m: usize, n: usize) -> IntMatrix {
        let data = (0..m * n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        IntMatrix::new(m, n, data).unwrap()
    }

    #[test]
    fn constant_matrix_has_dimension_zero() {
        assert_eq!(ldim(&IntMatrix::ones(3, 4)).unwrap(), 0);
        assert_eq!(ldim_alpha(&RealMatrix::from_rows(&[[0.3, 0.3], [1.0, 1.0]]), 0.1).unwrap(), 0);
    }

    #[test]
    fn single_split() {
        assert_eq!(ldim(&IntMatrix::from_rows(&[[1, -1]])).unwrap(), 1);
        assert_eq!(ldim_alpha(&RealMatrix::from_rows(&[[0.0, 1.0]]), 1.0).unwrap(), 1);
        assert_eq!(ldim_alpha(&RealMatrix::from_rows(&[[0.0, 1.0]]), 1.5).unwrap(), 0);
    }

    #[test]
    fn all_sign_patterns_have_full_dimension() {
        for d in 1..=4 {
            let a = all_patterns(d);
            let expected = oracle_ldim(&a.to_real(), &(0..a.cols()).collect::<Vec<_>>(), None);
            assert_eq!(expected, d as u32);
            assert_eq!(ldim(&a).unwrap(), expected);
        }
    }

    #[test]
    fn non_sign_rejected() {
        assert!(ldim(&IntMatrix::from_rows(&[[0, 1]])).is_err());
        assert!(ldim_alpha(&RealMatrix::from_rows(&[[0.0]]), 0.0).is_err());
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let a = random_sign(&mut rng, 3, 6);
            let all: Vec<usize> = (0..6).collect();
            assert_eq!(ldim(&a).unwrap(), oracle_ldim(&a.to_real(), &all, None));
            let r = RealMatrix::new(3, 6, (0..18).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            for alpha in [0.25, 0.5, 1.0] {
                assert_eq!(ldim_alpha(&r, alpha).unwrap(), oracle_ldim(&r, &all, Some(alpha)), "alpha {alpha}");
            }
        }
    }

    #[test]
    fn alpha_two_on_sign_matrices_is_ldim() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let a = random_sign(&mut rng, 4, 8);
            assert_eq!(ldim_alpha(&a.to_real(), 2.0).unwrap(), ldim(&a).unwrap());
        }
    }

    #[test]
    fn witnesses_are_shattered() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_sign(&mut rng, 4, 10);
            let t = ldim_witness(&a, DEFAULT_BUDGET).unwrap();
            assert_eq!(t.depth, ldim(&a).unwrap());
            assert_eq!(t.nodes.len(), (1usize << t.depth) - 1);
            assert!(t.is_shattered_by(&a.to_real()));
            let r = RealMatrix::new(3, 12, (0..36).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let w = ldim_alpha_witness(&r, 0.25, DEFAULT_BUDGET).unwrap();
            assert!(w.is_shattered_by(&r));
            for nd in &w.nodes {
                assert!(nd.threshold.abs() <= r.max_abs() + 0.125);
            }
        }
    }

    #[test]
    fn budget_is_reported() {
        let a = all_patterns(4);
        assert!(matches!(ldim_with_budget(&a, 3), Err(Error::BudgetExceeded { budget: 3 })));
    }

    #[test]
    fn majority_on_identical_columns_keeps_everything() {
        let a = IntMatrix::from_rows(&[[1, 1, 1], [-1, -1, -1]]);
        let res = majority_stabilize(&a, 0.25).unwrap();
        assert_eq!(res.columns, vec![0, 1, 2]);
        assert_eq!(res.row_function, RowFunction::Signs(vec![1, -1]));
        assert_eq!(res.dimension, Some(0));
    }

    #[test]
    fn majority_on_small_example() {
        let a = IntMatrix::from_rows(&[[1, 0], [1, 1]]).boolean_to_sign().unwrap();
        let res = majority_stabilize(&a, 0.3).unwrap();
        assert!(res.max_violation() <= 0.3);
        assert!(res.columns.len() as f64 >= res.size_bound.unwrap());
    }

    #[test]
    fn bucket_on_constant_rows() {
        let a = RealMatrix::from_rows(&[[0.5, 0.5, 0.5], [-0.25, -0.25, -0.25]]);
        let res = bucket_stabilize(&a, 0.125, 0.1).unwrap();
        assert_eq!(res.columns, vec![0, 1, 2]);
        assert_eq!(res.row_function, RowFunction::Values(vec![0.5, -0.25]));
        assert_eq!(res.max_violation(), 0.0);
    }

    #[test]
    fn bucket_single_row_example() {
        let a = RealMatrix::from_rows(&[[0.0, 1.0, 0.0, 0.0]]);
        let res = bucket_stabilize(&a, 0.125, 0.3).unwrap();
        assert_eq!(res.columns.len(), 4);
        let RowFunction::Values(g) = &res.row_function else { panic!() };
        let close = (0..4).filter(|&y| (a.get(0, y) - g[0]).abs() < 0.25).count();
        assert!(close as f64 >= 0.7 * 4.0);
    }

    #[test]
    fn bucket_recurses_when_a_row_spreads() {
        let a = RealMatrix::from_rows(&[[-1.0, -1.0, 1.0, 1.0, 0.0, 1.0]]);
        let res = bucket_stabilize(&a, 0.125, 0.1).unwrap();
        assert!(res.max_violation() <= 0.1);
        assert!(res.certified);
        assert!(res.columns.len() as f64 >= res.size_bound.unwrap());
    }

    #[test]
    fn bucket_accepts_zero_eps() {
        let a = RealMatrix::from_rows(&[[0.0, 1.0, 2.0], [1.0, 1.0, 0.0]]);
        let res = bucket_stabilize(&a, 0.125, 0.0).unwrap();
        assert_eq!(res.max_violation(), 0.0);
    }
}
