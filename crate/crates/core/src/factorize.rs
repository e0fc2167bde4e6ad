//! γ₂ factorizations: verification, an upper-bound solver, exact certificates
//! for signed blocky sums, and lower bounds from max-entry and Littlestone
//! arguments.
//!
//! The solver works with row weights `p` and column weights `q` (probability
//! vectors). For fixed weights, the SVD `D_√p A D_√q = L Σ Rᵀ` yields the
//! factorization
//!
//! ```text
//! u_x = a_x D_√q R Σ^{-1/2},    v_y = Σ^{-1/2} Lᵀ D_√p a^y,
//! ```
//!
//! whose weighted norms `Σ p_x‖u_x‖² = Σ q_y‖v_y‖² = ‖D_√p A D_√q‖_tr` are
//! balanced. The trace norm is a lower bound on γ₂ for every weight pair and
//! `max‖u_x‖·max‖v_y‖` is an upper bound; the weights are pushed
//! multiplicatively toward rows and columns with large norms until the two
//! meet. The best factorization found is polished with an exact
//! least-squares solve for `V` and rescaled to unit maximum row norm.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blocky::SignedBlockySum;
use crate::error::{input, Error, Result};
use crate::littlestone::{ldim_alpha_with_budget, ldim_with_budget};
use crate::matrix::{IntMatrix, RealMatrix};

/// `A = UV` with rows of `U` of norm at most 1 and columns of `V` of norm at
/// most `gamma`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaFactorization {
    /// `m × t`
    pub u: RealMatrix,
    /// `t × n`
    pub v: RealMatrix,
    pub gamma: f64,
    /// `‖A − UV‖_max` against the matrix the factorization was built for.
    pub residual: f64,
    /// False when the solver could not bring the residual under tolerance.
    pub certifying: bool,
}

impl GammaFactorization {
    /// Builds a factorization from explicit factors, measuring `gamma` as the
    /// largest column norm of `V`.
    pub fn from_factors(u: RealMatrix, v: RealMatrix) -> Result<Self> {
        if u.cols() != v.rows() {
            return input(format!("inner dimensions differ: U is {:?}, V is {:?}", u.shape(), v.shape()));
        }
        let gamma = max_col_norm(&v);
        Ok(Self {
            u,
            v,
            gamma,
            residual: 0.0,
            certifying: true,
        })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            u: RealMatrix::zeros(rows, 0),
            v: RealMatrix::zeros(0, cols),
            gamma: 0.0,
            residual: 0.0,
            certifying: true,
        }
    }

    pub fn inner_dim(&self) -> usize {
        self.u.cols()
    }

    /// The product `UV`.
    pub fn product(&self) -> RealMatrix {
        matmul(&self.u, &self.v)
    }

    /// Same `U`, new `V`.
    pub fn with_v(&self, v: RealMatrix) -> Result<Self> {
        Self::from_factors(self.u.clone(), v)
    }

    pub fn max_row_norm(&self) -> f64 {
        max_row_norm(&self.u)
    }

    /// Column `y` of `V`.
    pub fn v_col(&self, y: usize) -> Vec<f64> {
        (0..self.v.rows()).map(|k| self.v.get(k, y)).collect()
    }

    /// Row `x` of `U`.
    pub fn u_row(&self, x: usize) -> &[f64] {
        self.u.row(x)
    }

    /// Recomputes the residual against `a`.
    pub fn measure_residual(&mut self, a: &RealMatrix) -> Result<f64> {
        self.residual = self.product().max_diff(a)?;
        Ok(self.residual)
    }
}

pub(crate) fn matmul(u: &RealMatrix, v: &RealMatrix) -> RealMatrix {
    let (m, t) = u.shape();
    let n = v.cols();
    let mut data = vec![0.0; m * n];
    for x in 0..m {
        let ux = u.row(x);
        let out = &mut data[x * n..(x + 1) * n];
        for (k, &uk) in ux.iter().enumerate().take(t) {
            if uk == 0.0 {
                continue;
            }
            for (o, &vk) in out.iter_mut().zip(v.row(k)) {
                *o += uk * vk;
            }
        }
    }
    RealMatrix::new(m, n, data).expect("finite product")
}

fn max_row_norm(u: &RealMatrix) -> f64 {
    (0..u.rows())
        .map(|x| u.row(x).iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

fn max_col_norm(v: &RealMatrix) -> f64 {
    (0..v.cols())
        .map(|y| (0..v.rows()).map(|k| v.get(k, y).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Measured quantities from [`verify_factorization`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FactorizationCheck {
    pub valid: bool,
    pub max_row_norm: f64,
    pub max_col_norm: f64,
    pub residual: f64,
}

/// Checks that `F` is a `F.gamma`-factorization of `A` within `tol`.
pub fn verify_factorization(a: &RealMatrix, f: &GammaFactorization, tol: f64) -> Result<FactorizationCheck> {
    if f.u.rows() != a.rows() || f.v.cols() != a.cols() || f.u.cols() != f.v.rows() {
        return Err(Error::ShapeMismatch {
            expected: a.shape(),
            found: (f.u.rows(), f.v.cols()),
        });
    }
    let max_row = max_row_norm(&f.u);
    let max_col = max_col_norm(&f.v);
    let residual = f.product().max_diff(a)?;
    let valid = max_row <= 1.0 + tol && max_col <= f.gamma + tol && residual <= tol;
    Ok(FactorizationCheck {
        valid,
        max_row_norm: max_row,
        max_col_norm: max_col,
        residual,
    })
}

/// Solver settings for [`gamma2_upper`].
#[derive(Clone, Debug, PartialEq)]
pub struct Gamma2Options {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for Gamma2Options {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iter: 400,
            tol: 1e-9,
            seed: 0,
        }
    }
}

struct WeightedFactors {
    u: DMatrix<f64>,
    upper: f64,
    dual: f64,
    row_sq: Vec<f64>,
    col_sq: Vec<f64>,
    /// `‖UV − A‖_max`; large when rank truncation dropped a direction that
    /// matters after unweighting.
    residual: f64,
}

fn factors_for_weights(a: &DMatrix<f64>, p: &[f64], q: &[f64]) -> Option<WeightedFactors> {
    let (m, n) = a.shape();
    let sp: Vec<f64> = p.iter().map(|v| v.sqrt()).collect();
    let sq: Vec<f64> = q.iter().map(|v| v.sqrt()).collect();
    let b = DMatrix::from_fn(m, n, |x, y| sp[x] * a[(x, y)] * sq[y]);
    let svd = b.svd(true, true);
    let l = svd.u.as_ref()?;
    let rt = svd.v_t.as_ref()?;
    let smax = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    if smax == 0.0 {
        return None;
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > smax * 1e-11)
        .collect();
    let r = keep.len();
    // u_x = a_x D_√q R Σ^{-1/2}
    let u = DMatrix::from_fn(m, r, |x, j| {
        let k = keep[j];
        let s = svd.singular_values[k];
        (0..n).map(|y| a[(x, y)] * sq[y] * rt[(k, y)]).sum::<f64>() / s.sqrt()
    });
    // v_y = Σ^{-1/2} Lᵀ D_√p a^y
    let v = DMatrix::from_fn(r, n, |j, y| {
        let k = keep[j];
        let s = svd.singular_values[k];
        (0..m).map(|x| l[(x, k)] * sp[x] * a[(x, y)]).sum::<f64>() / s.sqrt()
    });
    let row_sq: Vec<f64> = (0..m).map(|x| u.row(x).norm_squared()).collect();
    let col_sq: Vec<f64> = (0..n).map(|y| v.column(y).norm_squared()).collect();
    let upper = row_sq.iter().fold(0.0f64, |a, &b| a.max(b)).sqrt() * col_sq.iter().fold(0.0f64, |a, &b| a.max(b)).sqrt();
    let dual = keep.iter().map(|&k| svd.singular_values[k]).sum();
    let residual = (&u * &v - a).amax();
    Some(WeightedFactors {
        u,
        upper,
        dual,
        row_sq,
        col_sq,
        residual,
    })
}

const WEIGHT_FLOOR: f64 = 1e-9;
/// Relative reconstruction error above which an iterate is not a candidate.
const CANDIDATE_TOL: f64 = 1e-9;
const STEP: f64 = 0.5;

fn reweight(w: &mut [f64], sq_norms: &[f64], scale: f64) {
    for (wi, &s) in w.iter_mut().zip(sq_norms) {
        *wi *= (s / scale).max(0.0).powf(STEP);
    }
    let total: f64 = w.iter().sum();
    for wi in w.iter_mut() {
        *wi = (*wi / total).max(WEIGHT_FLOOR);
    }
}

fn initial_weights(len: usize, rng: Option<&mut ChaCha8Rng>) -> Vec<f64> {
    let mut w: Vec<f64> = match rng {
        None => vec![1.0; len],
        Some(rng) => (0..len).map(|_| rng.gen_range(0.5..1.5)).collect(),
    };
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Upper bound on `‖A‖_γ2` certified by an explicit factorization.
///
/// Deterministic in `(A, opts)`. Restart 0 starts from uniform weights, later
/// restarts from seeded random ones; the first restart reaching the smallest
/// bound (within 1e-12) wins. The returned `U` has inner dimension equal to
/// the numerical rank of `A`, which is at most `min(m, n)`.
pub fn gamma2_upper(a: &RealMatrix, opts: &Gamma2Options) -> Result<GammaFactorization> {
    let (m, n) = a.shape();
    if a.max_abs() == 0.0 {
        return Ok(GammaFactorization::zero(m, n));
    }
    let dm = DMatrix::from_row_slice(m, n, a.as_slice());
    let candidate_tol = CANDIDATE_TOL * a.max_abs().max(1.0);
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let (mut p, mut q) = if restart == 0 {
            (initial_weights(m, None), initial_weights(n, None))
        } else {
            (initial_weights(m, Some(&mut rng)), initial_weights(n, Some(&mut rng)))
        };
        for _ in 0..opts.max_iter.max(1) {
            let Some(f) = factors_for_weights(&dm, &p, &q) else { break };
            if f.residual <= candidate_tol && best.as_ref().is_none_or(|(g, _, _)| f.upper < g - 1e-12) {
                best = Some((f.upper, p.clone(), q.clone()));
            }
            if f.upper - f.dual <= 1e-13 * f.upper.max(1.0) {
                break;
            }
            reweight(&mut p, &f.row_sq, f.dual);
            reweight(&mut q, &f.col_sq, f.dual);
        }
    }
    // Uniform weights are the fallback; polish then reports the achieved residual.
    let (_, p, q) = best.unwrap_or_else(|| (0.0, initial_weights(m, None), initial_weights(n, None)));
    let f = factors_for_weights(&dm, &p, &q).expect("weights reproduce");
    polish(a, &dm, f.u, opts.tol)
}

/// Solves `V = U⁺A` exactly and rescales so the largest row norm of `U` is 1.
fn polish(a: &RealMatrix, dm: &DMatrix<f64>, mut u: DMatrix<f64>, tol: f64) -> Result<GammaFactorization> {
    let scale = (0..u.nrows()).map(|x| u.row(x).norm()).fold(0.0f64, f64::max);
    if scale > 0.0 {
        u /= scale;
    }
    let svd = u.clone().svd(true, true);
    let v = svd
        .solve(dm, 1e-13)
        .map_err(|e| Error::InvalidFactorization(e.to_string()))?;
    let u_rm = to_real(&u)?;
    let v_rm = to_real(&v)?;
    let mut f = GammaFactorization::from_factors(u_rm, v_rm)?;
    f.measure_residual(a)?;
    f.certifying = f.residual <= tol;
    Ok(f)
}

fn to_real(m: &DMatrix<f64>) -> Result<RealMatrix> {
    let (r, c) = m.shape();
    RealMatrix::new(r, c, (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect())
}

/// Exact factorization of a signed blocky sum: one coordinate per rectangle,
/// `u_x` indicating the rectangles containing row `x` and `v_y` carrying the
/// term sign on the rectangles containing column `y`. Rescaled to unit
/// maximum row norm, so `gamma ≤ L`.
pub fn factorization_from_blocky_sum(d: &SignedBlockySum) -> GammaFactorization {
    let (m, n) = d.shape();
    let t: usize = d.terms().iter().map(|term| term.blocky.rectangles().len()).sum();
    let mut u = vec![0.0; m * t];
    let mut v = vec![0.0; t * n];
    let mut k = 0;
    for term in d.terms() {
        let s = term.sign.value() as f64;
        for rect in term.blocky.rectangles() {
            for &x in rect.rows() {
                u[x * t + k] = 1.0;
            }
            for &y in rect.cols() {
                v[k * n + y] = s;
            }
            k += 1;
        }
    }
    let row_sq_max = (0..m)
        .map(|x| u[x * t..(x + 1) * t].iter().filter(|&&e| e != 0.0).count())
        .max()
        .unwrap_or(0);
    if row_sq_max > 1 {
        let scale = (row_sq_max as f64).sqrt();
        u.iter_mut().for_each(|e| *e /= scale);
        v.iter_mut().for_each(|e| *e *= scale);
    }
    let u = RealMatrix::new(m, t, u).unwrap();
    let v = RealMatrix::new(t, n, v).unwrap();
    let mut f = GammaFactorization::from_factors(u, v).unwrap();
    f.measure_residual(&d.evaluate().to_real()).unwrap();
    f
}

/// Which inequality produced a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum LowerWitness {
    /// `‖A‖_γ2 ≥ ‖A‖_max`.
    MaxEntry,
    /// `‖A‖_γ2 ≥ √Ldim(A)` for sign matrices.
    SqrtLittlestone { ldim: u32 },
    /// `‖A‖_γ2 ≥ α√Ldim_α(A) / (2(‖A‖_max + 1)) − 1`.
    WeightedLittlestone { alpha: f64, ldim: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    pub witness: LowerWitness,
}

/// α grid for the weighted Littlestone bound.
pub const ALPHA_GRID: [f64; 4] = [0.125, 0.25, 0.5, 1.0];

/// Best of the max-entry, Littlestone, and weighted Littlestone lower bounds.
/// Dimensions whose exact recursion exceeds `budget` are skipped.
pub fn gamma2_lower(a: &RealMatrix, budget: u64) -> Result<LowerBound> {
    let mut best = LowerBound {
        value: a.max_abs(),
        witness: LowerWitness::MaxEntry,
    };
    if a.cols() == 0 || a.max_abs() == 0.0 {
        return Ok(best);
    }
    let is_sign = a.as_slice().iter().all(|&v| v == 1.0 || v == -1.0);
    if is_sign {
        let ints = IntMatrix::new(a.rows(), a.cols(), a.as_slice().iter().map(|&v| v as i64).collect())?;
        match ldim_with_budget(&ints, budget) {
            Ok(d) => {
                let value = (d as f64).sqrt();
                if value > best.value {
                    best = LowerBound {
                        value,
                        witness: LowerWitness::SqrtLittlestone { ldim: d },
                    };
                }
            }
            Err(Error::BudgetExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let big_m = a.max_abs();
    for alpha in ALPHA_GRID {
        match ldim_alpha_with_budget(a, alpha, budget) {
            Ok(d) => {
                let value = alpha * (d as f64).sqrt() / (2.0 * (big_m + 1.0)) - 1.0;
                if value > best.value {
                    best = LowerBound {
                        value,
                        witness: LowerWitness::WeightedLittlestone { alpha, ldim: d },
                    };
                }
            }
            Err(Error::BudgetExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// Lower and upper bounds on `‖A‖_γ2`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: LowerWitness,
    pub upper_witness: GammaFactorization,
}

pub fn gamma2_bracket(a: &RealMatrix, opts: &Gamma2Options, budget: u64) -> Result<NormBracket> {
    let lower = gamma2_lower(a, budget)?;
    let upper = gamma2_upper(a, opts)?;
    Ok(NormBracket {
        lower: lower.value,
        upper: upper.gamma,
        lower_witness: lower.witness,
        upper_witness: upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocky::{BlockyMatrix, Sign};
    use crate::matrix::IntMatrix;

    fn opts() -> Gamma2Options {
        Gamma2Options::default()
    }

    #[test]
    fn trivial_factorization_verifies() {
        let a = RealMatrix::from_rows(&[[1.0]]);
        let f = GammaFactorization::from_factors(a.clone(), a.clone()).unwrap();
        assert!(verify_factorization(&a, &f, 1e-9).unwrap().valid);
        let bad = GammaFactorization::from_factors(RealMatrix::from_rows(&[[1.2]]), RealMatrix::from_rows(&[[1.0]])).unwrap();
        let check = verify_factorization(&a, &bad, 1e-9).unwrap();
        assert!(!check.valid);
        assert!((check.max_row_norm - 1.2).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = RealMatrix::from_rows(&[[1.0, 0.0]]);
        let f = GammaFactorization::from_factors(RealMatrix::from_rows(&[[1.0]]), RealMatrix::from_rows(&[[1.0]])).unwrap();
        assert!(verify_factorization(&a, &f, 1e-9).is_err());
    }

    #[test]
    fn identity_and_all_ones_have_norm_one() {
        for a in [IntMatrix::identity(3), IntMatrix::ones(3, 5)] {
            let f = gamma2_upper(&a.to_real(), &opts()).unwrap();
            assert!(f.gamma >= 1.0 - 1e-12 && f.gamma <= 1.0 + 1e-6, "{}", f.gamma);
            assert!(f.certifying);
        }
    }

    #[test]
    fn three_ones_matrix_reaches_two_over_root_three() {
        let a = RealMatrix::from_rows(&[[1.0, 0.0], [1.0, 1.0]]);
        let f = gamma2_upper(&a, &opts()).unwrap();
        let target = 2.0 / 3f64.sqrt();
        assert!(f.gamma >= target - 1e-9 && f.gamma <= target + 1e-3, "{}", f.gamma);
        assert!(verify_factorization(&a, &f, 1e-6).unwrap().valid);
    }

    #[test]
    fn zero_matrix_gives_zero() {
        let f = gamma2_upper(&RealMatrix::zeros(2, 2), &opts()).unwrap();
        assert_eq!(f.gamma, 0.0);
        assert_eq!(f.inner_dim(), 0);
        assert_eq!(gamma2_lower(&RealMatrix::zeros(2, 2), 1000).unwrap().value, 0.0);
    }

    #[test]
    fn solver_is_deterministic() {
        let a = RealMatrix::from_rows(&[[1.0, -1.0, 1.0], [1.0, 1.0, -1.0], [-1.0, 1.0, 1.0]]);
        let o = Gamma2Options { seed: 9, ..opts() };
        let f1 = gamma2_upper(&a, &o).unwrap();
        let f2 = gamma2_upper(&a, &o).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn lower_bound_examples() {
        let a = RealMatrix::from_rows(&[[1.0, 0.0], [1.0, 1.0]]);
        let lb = gamma2_lower(&a, 100_000).unwrap();
        assert!(lb.value >= 1.0);

        let d = 4;
        let mut s = IntMatrix::zeros(d, 1 << d);
        for c in 0..1 << d {
            for r in 0..d {
                s.set(r, c, if (c >> r) & 1 == 1 { 1 } else { -1 });
            }
        }
        let lb = gamma2_lower(&s.to_real(), 1_000_000).unwrap();
        assert_eq!(lb.value, 2.0);
        assert_eq!(lb.witness, LowerWitness::SqrtLittlestone { ldim: 4 });
    }

    #[test]
    fn blocky_sum_certificates() {
        let shape = (3, 3);
        let b = BlockyMatrix::single(shape, vec![0, 1], vec![1, 2]).unwrap();
        let mut d = SignedBlockySum::new(shape);
        d.push(Sign::Plus, b.clone()).unwrap();
        let f = factorization_from_blocky_sum(&d);
        assert_eq!(f.gamma, 1.0);
        assert_eq!(f.residual, 0.0);

        d.push(Sign::Plus, BlockyMatrix::single(shape, vec![2], vec![0]).unwrap()).unwrap();
        let f = factorization_from_blocky_sum(&d);
        assert!(f.gamma <= 2.0);
        assert!(verify_factorization(&d.evaluate().to_real(), &f, 1e-9).unwrap().valid);

        let mut same = SignedBlockySum::new(shape);
        for _ in 0..3 {
            same.push(Sign::Minus, b.clone()).unwrap();
        }
        let f = factorization_from_blocky_sum(&same);
        assert!(f.gamma <= 3.0 + 1e-12);
        assert!(verify_factorization(&same.evaluate().to_real(), &f, 1e-9).unwrap().valid);
    }
}
