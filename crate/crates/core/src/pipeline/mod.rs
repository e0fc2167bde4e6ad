//! The decomposition pipeline: repeated norm-decrement steps turning a
//! γ-factorization of an integer matrix into a signed blocky sum, plus an
//! exhaustive block-complexity oracle for tiny matrices.

mod experiment;
mod key_lemma;
mod oracle;

pub use experiment::{random_lower_bound_experiment, reference_bound, ExperimentMode, LowerBoundReport};
pub use key_lemma::{
    key_lemma_step, key_lemma_step_with, ClassDiagnostics, KeyLemmaOutput, RoundDiagnostics, ALPHA, EPS_FLOOR,
    SAFETY_MARGIN,
};
pub use oracle::{count_blocky, exact_block_complexity, OracleResult};

use serde::{Deserialize, Serialize};

use crate::blocky::SignedBlockySum;
use crate::error::{Error, Result};
use crate::factorize::{gamma2_upper, verify_factorization, Gamma2Options, GammaFactorization};
use crate::littlestone::DEFAULT_BUDGET;
use crate::matrix::{round_to_integers, IntMatrix};

/// Settings for [`decompose`].
#[derive(Clone, Debug)]
pub struct DecomposeConfig {
    pub gamma2: Gamma2Options,
    /// Tolerance for accepting the input factorization.
    pub tol: f64,
    /// Node budget for each exact Littlestone recursion.
    pub budget: u64,
    /// Proceed with a factorization that fails verification.
    pub force: bool,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        Self {
            gamma2: Gamma2Options::default(),
            tol: 1e-9,
            budget: DEFAULT_BUDGET,
            force: false,
        }
    }
}

/// Summary of one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelSummary {
    pub gamma_squared_in: f64,
    pub gamma_squared_out: f64,
    pub eps_in: f64,
    pub eps_out: f64,
    /// `‖A − A′ − round(A − A′)‖_max` for the matrix passed to the next level.
    pub eps_next: f64,
    pub terms: usize,
    pub zero_columns: usize,
    pub rounds: Vec<RoundDiagnostics>,
    /// Whether `round(A) = round(A′) + round(A − A′)` held.
    pub rounding_additive: bool,
}

/// Term count against `ln(min(m, n))²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundFit {
    pub log_min_dim_squared: f64,
    /// `L / ln(min(m, n))²`, absent when `min(m, n) = 1`.
    pub constant: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineReport {
    pub shape: (usize, usize),
    pub gamma0: f64,
    /// `⌈8γ₀²⌉`
    pub level_bound: usize,
    pub levels: Vec<LevelSummary>,
    pub total_terms: usize,
    pub gamma_squared_trajectory: Vec<f64>,
    pub eps_trajectory: Vec<f64>,
    pub bound_fit: BoundFit,
}

impl PipelineReport {
    fn empty(shape: (usize, usize), gamma0: f64) -> Self {
        Self {
            shape,
            gamma0,
            level_bound: (8.0 * gamma0 * gamma0).ceil() as usize,
            levels: Vec::new(),
            total_terms: 0,
            gamma_squared_trajectory: vec![gamma0 * gamma0],
            eps_trajectory: Vec::new(),
            bound_fit: bound_fit(shape, 0),
        }
    }

    /// Whether every level lowered `γ²` by at least `1/8`.
    pub fn decrements_hold(&self) -> bool {
        self.gamma_squared_trajectory.windows(2).all(|w| w[1] <= w[0] - 0.125 + 1e-9)
    }
}

fn bound_fit(shape: (usize, usize), terms: usize) -> BoundFit {
    let l = (shape.0.min(shape.1) as f64).ln().powi(2);
    BoundFit {
        log_min_dim_squared: l,
        constant: (l > 0.0).then(|| terms as f64 / l),
    }
}

/// Decomposes an integer matrix into a signed blocky sum.
///
/// Without a factorization, one is computed with [`gamma2_upper`]. Each level
/// runs [`key_lemma_step`] on the current real matrix `UV` and recurses on the
/// residual `(U, V′)` until it rounds to zero. The output is checked to
/// evaluate to `a` exactly.
pub fn decompose(
    a: &IntMatrix,
    f: Option<GammaFactorization>,
    config: &DecomposeConfig,
) -> Result<(SignedBlockySum, PipelineReport)> {
    let shape = a.shape();
    let real = a.to_real();
    let f = match f {
        Some(f) => f,
        None => gamma2_upper(&real, &config.gamma2)?,
    };
    let check = verify_factorization(&real, &f, config.tol)?;
    if !check.valid && !config.force {
        return Err(Error::InvalidFactorization(format!(
            "row norm {}, column norm {} (gamma {}), residual {} at tol {}",
            check.max_row_norm, check.max_col_norm, f.gamma, check.residual, config.tol
        )));
    }
    let mut sum = SignedBlockySum::new(shape);
    let mut report = PipelineReport::empty(shape, f.gamma);
    let mut current_f = f;
    let mut current = current_f.product();

    loop {
        let (current_z, cert) = round_to_integers(&current);
        if current_z.is_zero() {
            break;
        }
        report.eps_trajectory.push(cert.eps);
        if report.levels.len() >= report.level_bound.max(1) {
            return Err(Error::InvalidFactorization(format!(
                "level count exceeded the bound {} with gamma^2 trajectory {:?}",
                report.level_bound, report.gamma_squared_trajectory
            )));
        }
        let out = key_lemma_step_with(&current, &current_f, cert.eps, config.budget)?;
        let next = current.checked_sub(&out.a_prime)?;
        let (az_prime, _) = round_to_integers(&out.a_prime);
        let (next_z, next_cert) = round_to_integers(&next);
        let additive = az_prime.checked_add(&next_z)? == current_z;
        if !additive {
            let recombined = az_prime.checked_add(&next_z)?;
            let (row, col) = first_difference(&current_z, &recombined);
            return Err(Error::Reconstruction {
                row,
                col,
                expected: current_z.get(row, col),
                got: recombined.get(row, col),
            });
        }
        let gamma_out = out.residual_factorization.gamma;
        report.levels.push(LevelSummary {
            gamma_squared_in: out.gamma_in.powi(2),
            gamma_squared_out: gamma_out.powi(2),
            eps_in: cert.eps,
            eps_out: out.eps_out.eps,
            eps_next: next_cert.eps,
            terms: out.blocky_part.len(),
            zero_columns: out.zero_columns,
            rounds: out.rounds,
            rounding_additive: additive,
        });
        report.gamma_squared_trajectory.push(gamma_out.powi(2));
        sum.extend(out.blocky_part)?;
        current = next;
        current_f = out.residual_factorization;
    }

    let got = sum.evaluate();
    if &got != a {
        let (row, col) = first_difference(a, &got);
        return Err(Error::Reconstruction {
            row,
            col,
            expected: a.get(row, col),
            got: got.get(row, col),
        });
    }
    report.total_terms = sum.len();
    report.bound_fit = bound_fit(shape, sum.len());
    Ok((sum, report))
}

fn first_difference(a: &IntMatrix, b: &IntMatrix) -> (usize, usize) {
    let n = a.cols();
    let k = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .position(|(x, y)| x != y)
        .unwrap_or(0);
    (k / n, k % n)
}
