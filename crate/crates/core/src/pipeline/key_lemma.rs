use serde::{Deserialize, Serialize};

use crate::blocky::{BlockyMatrix, Rectangle, SignedBlockySum};
use crate::error::{input, Error, Result};
use crate::factorize::GammaFactorization;
use crate::littlestone::{bucket_stabilize_with, RowFunction, StabilizeOptions, DEFAULT_BUDGET};
use crate::matrix::{round_half_down, round_to_integers, AlmostIntegerCertificate, IntMatrix, RealMatrix};
use crate::partition::{greedy_l1_decompose, greedy_partition_on, subtract_average};

/// Bucket width used for stabilization.
pub const ALPHA: f64 = 0.125;
/// Lower floor on the measured eps fed to the stabilizer.
pub const EPS_FLOOR: f64 = 9.313225746154785e-10; // 2^-30
/// Largest distance to an integer tolerated at a rounding site.
pub const SAFETY_MARGIN: f64 = 0.25;
/// Slack on the residual between `A` and `UV` accepted as input.
pub const INPUT_TOL: f64 = 1e-6;

/// Sizes tracked for one greedy class in one round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassDiagnostics {
    pub row: usize,
    pub value: i64,
    /// `|S_i|`
    pub size: usize,
    /// `|S_i′|`
    pub stabilized: usize,
    /// `|S_i″|`
    pub kept: usize,
    /// `|⟨u_{x_i}, v̂_i⟩|`
    pub class_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundDiagnostics {
    /// Columns still unassigned at the start of the round.
    pub remaining: usize,
    /// `|Ỹ|` for this round.
    pub covered: usize,
    pub classes: Vec<ClassDiagnostics>,
}

/// Output of one [`key_lemma_step`].
#[derive(Clone, Debug)]
pub struct KeyLemmaOutput {
    pub a_prime: RealMatrix,
    /// Same `U`, columns `v′_y`; factors `A − A′`.
    pub residual_factorization: GammaFactorization,
    /// Evaluates to `round(A′)`.
    pub blocky_part: SignedBlockySum,
    pub eps_in: f64,
    pub eps_out: AlmostIntegerCertificate,
    pub gamma_in: f64,
    pub max_residual_norm_sq: f64,
    pub zero_columns: usize,
    pub rounds: Vec<RoundDiagnostics>,
}

impl KeyLemmaOutput {
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct ClassBlock {
    columns: Vec<usize>,
    g: Vec<i64>,
}

/// One norm-decrement step.
///
/// Splits `A ≈ UV` as `A′ + (A − A′)` where `round(A′)` has a cheap blocky
/// decomposition and every column of the residual factorization has squared
/// norm at most `γ² − 1/8`. `eps` is an almost-integer certificate for `A`.
pub fn key_lemma_step(a: &RealMatrix, f: &GammaFactorization, eps: f64) -> Result<KeyLemmaOutput> {
    key_lemma_step_with(a, f, eps, DEFAULT_BUDGET)
}

pub fn key_lemma_step_with(a: &RealMatrix, f: &GammaFactorization, eps: f64, budget: u64) -> Result<KeyLemmaOutput> {
    let (m, n) = a.shape();
    if f.u.rows() != m || f.v.cols() != n || f.u.cols() != f.v.rows() {
        return Err(Error::ShapeMismatch {
            expected: a.shape(),
            found: (f.u.rows(), f.v.cols()),
        });
    }
    if !(0.0..SAFETY_MARGIN).contains(&eps) {
        return input(format!("eps must lie in [0, 1/4), got {eps}"));
    }
    let row_norm = f.max_row_norm();
    if row_norm > 1.0 + 1e-9 {
        return Err(Error::InvalidFactorization(format!("row norm {row_norm} exceeds 1")));
    }
    let residual = f.product().max_diff(a)?;
    if residual > INPUT_TOL {
        return Err(Error::InvalidFactorization(format!("‖A − UV‖_max = {residual}")));
    }
    let (az, cert) = round_to_integers(a);
    if cert.eps > eps + INPUT_TOL {
        return input(format!("measured eps {} exceeds the stated {eps}", cert.eps));
    }
    if az.is_zero() {
        return input("the rounded matrix is zero; nothing to decompose");
    }

    let gamma = f.gamma;
    let eps1 = eps.max(EPS_FLOOR) / (10.0 * gamma);
    let opts = StabilizeOptions {
        budget,
        compute_bound: false,
    };
    let v_cols: Vec<Vec<f64>> = (0..n).map(|y| f.v_col(y)).collect();

    let mut a_prime = a.to_rows();
    let mut v_prime = v_cols.clone();
    let zero: Vec<usize> = (0..n).filter(|&y| az.is_zero_column(y)).collect();
    for &y in &zero {
        v_prime[y].iter_mut().for_each(|e| *e = 0.0);
    }
    let mut remaining: Vec<usize> = (0..n).filter(|&y| !az.is_zero_column(y)).collect();
    let mut blocks: Vec<ClassBlock> = Vec::new();
    let mut rounds = Vec::new();

    while !remaining.is_empty() {
        let partition = greedy_partition_on(&az, &remaining)?;
        let mut classes = Vec::with_capacity(partition.classes.len());
        let mut covered: Vec<usize> = Vec::new();
        for class in &partition.classes {
            let sub = a.select_cols(&class.columns);
            let stab = bucket_stabilize_with(&sub, ALPHA, eps1, &opts)?;
            let RowFunction::Values(g_real) = &stab.row_function else {
                unreachable!("bucket stabilizer returns real values")
            };
            let g: Vec<i64> = g_real.iter().map(|&v| round_half_down(v)).collect();
            let s1: Vec<usize> = stab.columns.iter().map(|&j| class.columns[j]).collect();
            let family: Vec<&[f64]> = s1.iter().map(|&y| v_cols[y].as_slice()).collect();
            let split = subtract_average(&family, gamma)?;
            let v_hat = &split.average;
            let class_value = dot(f.u_row(class.row), v_hat);
            if class_value.abs() < 0.5 - 1e-9 {
                return Err(Error::WeakAverage {
                    row: class.row,
                    value: class_value,
                });
            }
            let s2: Vec<usize> = split.kept.iter().map(|&j| s1[j]).collect();
            let column_value: Vec<f64> = (0..m).map(|x| dot(f.u_row(x), v_hat)).collect();
            for (x, (&value, &target)) in column_value.iter().zip(&g).enumerate() {
                let distance = (value - target as f64).abs();
                if distance >= SAFETY_MARGIN {
                    return Err(Error::RoundingSafety {
                        row: x,
                        col: s2[0],
                        value,
                        target,
                        distance,
                    });
                }
            }
            for &y in &s2 {
                for x in 0..m {
                    a_prime[x][y] = column_value[x];
                }
                for (vp, (v, h)) in v_prime[y].iter_mut().zip(v_cols[y].iter().zip(v_hat)) {
                    *vp = v - h;
                }
            }
            classes.push(ClassDiagnostics {
                row: class.row,
                value: class.value,
                size: class.columns.len(),
                stabilized: s1.len(),
                kept: s2.len(),
                class_value: class_value.abs(),
            });
            covered.extend_from_slice(&s2);
            blocks.push(ClassBlock { columns: s2, g });
        }
        if covered.is_empty() {
            return input("a round covered no columns");
        }
        covered.sort_unstable();
        rounds.push(RoundDiagnostics {
            remaining: remaining.len(),
            covered: covered.len(),
            classes,
        });
        remaining.retain(|y| covered.binary_search(y).is_err());
    }

    let a_prime = RealMatrix::try_from_rows(&a_prime)?;
    let t = f.u.cols();
    let mut v_data = vec![0.0; t * n];
    for (y, col) in v_prime.iter().enumerate() {
        for (k, &e) in col.iter().enumerate() {
            v_data[k * n + y] = e;
        }
    }
    let mut residual_factorization = f.with_v(RealMatrix::new(t, n, v_data)?)?;
    residual_factorization.measure_residual(&a.checked_sub(&a_prime)?)?;
    let max_residual_norm_sq = residual_factorization.gamma.powi(2);

    let blocky_part = expand_class_matrix((m, n), &blocks);
    let (_, eps_out) = round_to_integers(&a_prime);
    Ok(KeyLemmaOutput {
        a_prime,
        residual_factorization,
        blocky_part,
        eps_in: eps,
        eps_out,
        gamma_in: gamma,
        max_residual_norm_sq,
        zero_columns: zero.len(),
        rounds,
    })
}

/// Decomposes the compressed matrix with one column per class, then widens
/// each rectangle's columns to the class members.
fn expand_class_matrix(shape: (usize, usize), blocks: &[ClassBlock]) -> SignedBlockySum {
    let m = shape.0;
    let mut out = SignedBlockySum::new(shape);
    if blocks.is_empty() {
        return out;
    }
    let mut g = IntMatrix::zeros(m, blocks.len());
    for (c, block) in blocks.iter().enumerate() {
        for (x, &v) in block.g.iter().enumerate() {
            g.set(x, c, v);
        }
    }
    for term in greedy_l1_decompose(&g).terms() {
        let rects = term
            .blocky
            .rectangles()
            .iter()
            .map(|r| {
                let cols = r.cols().iter().flat_map(|&c| blocks[c].columns.iter().copied()).collect();
                Rectangle::new(r.rows().to_vec(), cols).expect("class columns are nonempty")
            })
            .collect();
        let b = BlockyMatrix::new(shape, rects).expect("classes have disjoint columns");
        out.push(term.sign, b).expect("same shape");
    }
    out
}
