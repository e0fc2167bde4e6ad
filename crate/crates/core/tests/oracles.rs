//! Cross-checks against independent brute-force or closed-form values.

use std::collections::HashMap;

use blocky::factorize::{gamma2_upper, verify_factorization, Gamma2Options};
use blocky::littlestone::ldim;
use blocky::matrix::{IntMatrix, RealMatrix};
use blocky::pipeline::{count_blocky, exact_block_complexity, OracleResult};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sylvester(k: u32) -> RealMatrix {
    let n = 1usize << k;
    let data = (0..n * n)
        .map(|i| if ((i / n) & (i % n)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 })
        .collect();
    RealMatrix::new(n, n, data).unwrap()
}

#[test]
fn hadamard_norm_is_root_n() {
    for k in 1..=3 {
        let h = sylvester(k);
        let f = gamma2_upper(&h, &Gamma2Options::default()).unwrap();
        let expected = ((1usize << k) as f64).sqrt();
        assert!((f.gamma - expected).abs() < 1e-6, "k = {k}: {}", f.gamma);
        assert!(f.certifying);
    }
}

#[test]
fn three_ones_matrix_is_two_over_root_three() {
    let a = RealMatrix::from_rows(&[[1.0, 0.0], [1.0, 1.0]]);
    let f = gamma2_upper(&a, &Gamma2Options::default()).unwrap();
    assert!((f.gamma - 2.0 / 3f64.sqrt()).abs() < 1e-8);
}

/// `‖A‖_tr / √(mn)` is a lower bound for any valid factorization.
#[test]
fn trace_norm_lower_bound_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let (m, n) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let data: Vec<f64> = (0..m * n).map(|_| rng.gen_range(-2..=2) as f64).collect();
        let a = RealMatrix::new(m, n, data.clone()).unwrap();
        let trace: f64 = DMatrix::from_row_slice(m, n, &data).singular_values().iter().sum();
        let f = gamma2_upper(&a, &Gamma2Options::default()).unwrap();
        assert!(verify_factorization(&a, &f, 1e-9).unwrap().valid);
        assert!(trace / ((m * n) as f64).sqrt() <= f.gamma + 1e-9);
    }
}

#[test]
fn weight_collapse_does_not_lose_rank() {
    let a = RealMatrix::from_rows(&[[0.0, 1.0, -1.0], [0.0, 1.0, 2.0], [1.0, 0.0, 0.0]]);
    let f = gamma2_upper(&a, &Gamma2Options::default()).unwrap();
    assert!(f.certifying, "residual {}", f.residual);
    let full = RealMatrix::from_rows(&[
        [1.0, 0.0, 0.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
        [-1.0, 1.0, 0.0, 1.0],
        [-1.0, 0.0, 1.0, 1.0],
    ]);
    let sub = RealMatrix::from_rows(&[[1.0, -1.0, 1.0, -1.0], [-1.0, 1.0, 0.0, 1.0], [-1.0, 0.0, 1.0, 1.0]]);
    let opts = Gamma2Options::default();
    let (gf, gs) = (gamma2_upper(&full, &opts).unwrap(), gamma2_upper(&sub, &opts).unwrap());
    assert!(gs.certifying && gf.certifying);
    assert!(gs.gamma <= gf.gamma + 1e-6, "{} > {}", gs.gamma, gf.gamma);
}

fn all_boolean(m: usize, n: usize) -> impl Iterator<Item = Vec<i64>> {
    (0u32..1 << (m * n)).map(move |bits| (0..m * n).map(|i| ((bits >> i) & 1) as i64).collect())
}

fn blocky_by_definition(m: usize, n: usize, d: &[i64]) -> bool {
    (0..m).all(|x| {
        (0..m).all(|z| {
            let meet = (0..n).any(|y| d[x * n + y] == 1 && d[z * n + y] == 1);
            !meet || (0..n).all(|y| d[x * n + y] == d[z * n + y])
        })
    })
}

#[test]
fn blocky_counts_match_enumeration() {
    for (m, n) in [(1, 3), (2, 2), (2, 3), (3, 3), (2, 4)] {
        let count = all_boolean(m, n).filter(|d| d.iter().any(|&v| v != 0) && blocky_by_definition(m, n, d)).count();
        assert_eq!(count_blocky(m, n).unwrap(), count, "{m}x{n}");
    }
}

/// Breadth-first search over sums of signed blocky matrices.
fn complexity_table(m: usize, n: usize, depth: usize) -> HashMap<Vec<i64>, usize> {
    let blocky: Vec<Vec<i64>> = all_boolean(m, n)
        .filter(|d| d.iter().any(|&v| v != 0) && blocky_by_definition(m, n, d))
        .collect();
    let mut seen = HashMap::from([(vec![0i64; m * n], 0usize)]);
    let mut frontier = vec![vec![0i64; m * n]];
    for level in 1..=depth {
        let mut next = Vec::new();
        for s in &frontier {
            for b in &blocky {
                for sign in [1, -1] {
                    let t: Vec<i64> = s.iter().zip(b).map(|(x, y)| x + sign * y).collect();
                    if !seen.contains_key(&t) {
                        seen.insert(t.clone(), level);
                        next.push(t);
                    }
                }
            }
        }
        frontier = next;
    }
    seen
}

#[test]
fn exact_oracle_matches_breadth_first_search() {
    for (m, n) in [(2, 2), (2, 3)] {
        let table = complexity_table(m, n, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(m as u64 * 10 + n as u64);
        for _ in 0..150 {
            let d: Vec<i64> = (0..m * n).map(|_| rng.gen_range(-2..=2)).collect();
            let a = IntMatrix::new(m, n, d.clone()).unwrap();
            let got = exact_block_complexity(&a, 4).unwrap();
            match table.get(&d) {
                Some(&k) => assert_eq!(got.value(), Some(k), "{a:?}"),
                None => assert_eq!(got, OracleResult::ExceedsLmax, "{a:?}"),
            }
        }
    }
}

fn ldim_by_definition(cols: &[Vec<i64>], rows: usize) -> u32 {
    if cols.len() <= 1 {
        return 0;
    }
    let mut best = 0;
    for x in 0..rows {
        let plus: Vec<Vec<i64>> = cols.iter().filter(|c| c[x] == 1).cloned().collect();
        let minus: Vec<Vec<i64>> = cols.iter().filter(|c| c[x] != 1).cloned().collect();
        if plus.is_empty() || minus.is_empty() {
            continue;
        }
        best = best.max(1 + ldim_by_definition(&plus, rows).min(ldim_by_definition(&minus, rows)));
    }
    best
}

#[test]
fn littlestone_dimension_matches_recursive_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..60 {
        let (m, n) = (rng.gen_range(1..5), rng.gen_range(1..9));
        let d: Vec<i64> = (0..m * n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        let a = IntMatrix::new(m, n, d.clone()).unwrap();
        let cols: Vec<Vec<i64>> = (0..n).map(|y| (0..m).map(|x| d[x * n + y]).collect()).collect();
        assert_eq!(ldim(&a).unwrap(), ldim_by_definition(&cols, m), "{a:?}");
    }
}
