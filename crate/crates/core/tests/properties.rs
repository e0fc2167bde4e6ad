use blocky::blocky::{is_blocky, BlockyCheck, Sign, SignedBlockySum};
use blocky::factorize::{
    factorization_from_blocky_sum, gamma2_lower, gamma2_upper, verify_factorization, Gamma2Options,
};
use blocky::generate::random_blocky;
use blocky::littlestone::{bucket_stabilize, ldim_witness, majority_stabilize, RowFunction, DEFAULT_BUDGET};
use blocky::matrix::{convolution_matrix, round_to_integers, IntMatrix, RealMatrix};
use blocky::partition::{greedy_l1_decompose, greedy_partition, subtract_average};
use blocky::pipeline::{decompose, exact_block_complexity, DecomposeConfig, OracleResult};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn int_matrix(max_rows: usize, max_cols: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        prop::collection::vec(lo..=hi, r * c).prop_map(move |d| IntMatrix::new(r, c, d).unwrap())
    })
}

fn real_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = RealMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-2.0f64..2.0, r * c).prop_map(move |d| RealMatrix::new(r, c, d).unwrap())
    })
}

fn sum_of_shape(r: usize, c: usize, k: usize, seed: u64) -> SignedBlockySum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = SignedBlockySum::new((r, c));
    for i in 0..k {
        let sign = if (seed >> i) & 1 == 0 { Sign::Plus } else { Sign::Minus };
        sum.push(sign, random_blocky(&mut rng, r, c)).unwrap();
    }
    sum
}

fn blocky_sum(max_dim: usize, max_terms: usize) -> impl Strategy<Value = SignedBlockySum> {
    (1..=max_dim, 1..=max_dim, 0..=max_terms, any::<u64>()).prop_map(|(r, c, k, seed)| sum_of_shape(r, c, k, seed))
}

fn small_config() -> Gamma2Options {
    Gamma2Options {
        restarts: 4,
        ..Gamma2Options::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_blocky_matrices_are_recognised(seed: u64, r in 1usize..8, c in 1usize..8) {
        let b = random_blocky(&mut ChaCha8Rng::seed_from_u64(seed), r, c);
        let m = b.to_matrix();
        prop_assert!(m.is_boolean());
        match is_blocky(&m).unwrap() {
            BlockyCheck::Blocky(canon) => prop_assert_eq!(canon.to_matrix(), m),
            BlockyCheck::Witness { .. } => prop_assert!(false, "generated matrix rejected"),
        }
    }

    #[test]
    fn non_blocky_witness_is_a_three_ones_pattern(a in int_matrix(5, 5, 0, 1)) {
        if let BlockyCheck::Witness { rows, cols } = is_blocky(&a).unwrap() {
            let sub = a.submatrix(&rows, &cols);
            let ones = sub.as_slice().iter().filter(|&&v| v == 1).count();
            prop_assert_eq!(sub.shape(), (2, 2));
            prop_assert_eq!(ones, 3);
        }
    }

    #[test]
    fn evaluation_is_additive(r in 1usize..6, c in 1usize..6, k in 0usize..4, l in 0usize..4, seeds: (u64, u64)) {
        let s = sum_of_shape(r, c, k, seeds.0);
        let t = sum_of_shape(r, c, l, seeds.1);
        let mut joined = s.clone();
        joined.extend(t.clone()).unwrap();
        prop_assert_eq!(joined.evaluate(), s.evaluate().checked_add(&t.evaluate()).unwrap());
        let neg = s.clone().negated().evaluate();
        prop_assert!(neg.checked_add(&s.evaluate()).unwrap().is_zero());
    }

    #[test]
    fn rounding_is_idempotent_and_measured(a in real_matrix(5, 5)) {
        let (az, cert) = round_to_integers(&a);
        prop_assert!(cert.eps <= 0.5);
        prop_assert!((a.max_diff(&az.to_real()).unwrap() - cert.eps).abs() < 1e-12);
        let (again, zero) = round_to_integers(&az.to_real());
        prop_assert_eq!(again, az);
        prop_assert_eq!(zero.eps, 0.0);
    }

    #[test]
    fn greedy_l1_is_exact_and_within_bound(a in int_matrix(5, 6, -3, 3)) {
        let sum = greedy_l1_decompose(&a);
        prop_assert_eq!(sum.evaluate(), a.clone());
        prop_assert!(sum.len() as i64 <= 2 * a.max_row_l1());
        for t in sum.terms() {
            prop_assert!(is_blocky(&t.blocky.to_matrix()).unwrap().is_blocky());
        }
    }

    #[test]
    fn subtract_average_meets_its_guarantees(
        vs in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 1..20)
    ) {
        let gamma = vs.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(1e-9, f64::max);
        let split = subtract_average(&vs, gamma).unwrap();
        for k in 0..3 {
            let mean = vs.iter().map(|v| v[k]).sum::<f64>() / vs.len() as f64;
            prop_assert!((split.average[k] - mean).abs() < 1e-12);
        }
        let c2 = split.norm_of_average.powi(2);
        for &i in &split.kept {
            prop_assert!(split.drops[i] >= c2 / 2.0 - 1e-9);
        }
        prop_assert!(split.kept.len() as f64 >= split.size_bound - 1e-9);
        prop_assert!(!split.kept.is_empty());
    }

    #[test]
    fn greedy_partition_classes_shrink_and_respect_density(a in int_matrix(5, 12, -2, 2)) {
        let nonzero: Vec<usize> = (0..a.cols()).filter(|&y| !a.is_zero_column(y)).collect();
        prop_assume!(nonzero.len() == a.cols());
        let p = greedy_partition(&a).unwrap();
        let sizes: Vec<usize> = p.classes.iter().map(|c| c.columns.len()).collect();
        prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(sizes.iter().sum::<usize>(), a.cols());
        for c in &p.classes {
            prop_assert!(c.value != 0);
            prop_assert!(c.columns.iter().all(|&y| a.get(c.row, y) == c.value));
        }
        let bound = (a.cols() as f64).ln() + 1.0;
        prop_assert!(p.max_harmonic_sum(&a) <= bound + 1e-9);
    }

    #[test]
    fn ldim_witness_is_shattered_and_bounded(a in int_matrix(4, 8, 0, 1)) {
        let signs = a.boolean_to_sign().unwrap();
        let tree = ldim_witness(&signs, DEFAULT_BUDGET).unwrap();
        prop_assert!(tree.is_shattered_by(&signs.to_real()));
        let mut distinct: Vec<Vec<i64>> = (0..signs.cols())
            .map(|y| (0..signs.rows()).map(|x| signs.get(x, y)).collect())
            .collect();
        distinct.sort();
        distinct.dedup();
        prop_assert!(1usize << tree.depth <= distinct.len());
    }

    #[test]
    fn majority_stabilizer_respects_eps(a in int_matrix(4, 16, 0, 1)) {
        let signs = a.boolean_to_sign().unwrap();
        let r = majority_stabilize(&signs, 0.25).unwrap();
        prop_assert!(!r.columns.is_empty());
        prop_assert!(r.max_violation() <= 0.25 + 1e-12);
        if let Some(bound) = r.size_bound {
            prop_assert!(r.columns.len() as f64 >= bound - 1e-9);
        }
    }

    #[test]
    fn bucket_stabilizer_respects_eps(a in real_matrix(4, 24)) {
        let clipped = RealMatrix::new(a.rows(), a.cols(), a.as_slice().iter().map(|v| v / 2.0).collect()).unwrap();
        let r = bucket_stabilize(&clipped, 0.125, 0.2).unwrap();
        prop_assert!(!r.columns.is_empty());
        prop_assert!(r.max_violation() <= 0.2 + 1e-12);
        prop_assert!(matches!(r.row_function, RowFunction::Values(_)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gamma2_bounds_are_ordered(a in int_matrix(4, 4, -2, 2)) {
        let f = gamma2_upper(&a.to_real(), &small_config()).unwrap();
        let check = verify_factorization(&a.to_real(), &f, 1e-6).unwrap();
        prop_assert!(check.valid);
        let lower = gamma2_lower(&a.to_real(), DEFAULT_BUDGET).unwrap();
        prop_assert!(lower.value <= f.gamma + 1e-6);
        prop_assert!(a.max_abs() as f64 <= f.gamma + 1e-6);
    }

    #[test]
    fn gamma2_does_not_grow_on_submatrices(a in int_matrix(4, 4, -1, 1)) {
        prop_assume!(a.rows() > 1);
        let opts = small_config();
        let full = gamma2_upper(&a.to_real(), &opts).unwrap().gamma;
        let rows: Vec<usize> = (1..a.rows()).collect();
        let cols: Vec<usize> = (0..a.cols()).collect();
        let sub = gamma2_upper(&a.submatrix(&rows, &cols).to_real(), &opts).unwrap().gamma;
        prop_assert!(sub <= full + 1e-3, "sub {sub} > full {full}");
    }

    #[test]
    fn blocky_sum_certificates_verify(s in blocky_sum(8, 4)) {
        let f = factorization_from_blocky_sum(&s);
        let check = verify_factorization(&s.evaluate().to_real(), &f, 1e-9).unwrap();
        prop_assert!(check.valid);
        prop_assert!(f.gamma <= s.len().max(1) as f64 + 1e-9);
    }

    #[test]
    fn decompose_is_exact(a in int_matrix(4, 5, -2, 2)) {
        prop_assume!(!a.is_zero());
        let (sum, report) = decompose(&a, None, &DecomposeConfig::default()).unwrap();
        prop_assert_eq!(sum.evaluate(), a);
        prop_assert_eq!(report.total_terms, sum.len());
        prop_assert!(report.decrements_hold());
    }

    #[test]
    fn oracle_never_beats_a_known_decomposition(a in int_matrix(3, 3, -1, 1)) {
        let greedy = greedy_l1_decompose(&a).len();
        match exact_block_complexity(&a, 6).unwrap() {
            OracleResult::Exact { value, witness } => {
                prop_assert!(value <= greedy);
                prop_assert_eq!(witness.len(), value);
                prop_assert_eq!(witness.evaluate(), a);
            }
            OracleResult::ExceedsLmax => prop_assert!(greedy > 6),
        }
    }

    #[test]
    fn gamma2_is_deterministic(a in int_matrix(3, 4, -2, 2), seed: u64) {
        let opts = Gamma2Options { seed, ..small_config() };
        let f1 = gamma2_upper(&a.to_real(), &opts).unwrap();
        let f2 = gamma2_upper(&a.to_real(), &opts).unwrap();
        prop_assert_eq!(f1.gamma.to_bits(), f2.gamma.to_bits());
        prop_assert_eq!(f1.u, f2.u);
    }
}

#[test]
fn subgroup_convolutions_are_blocky() {
    for n in 1..=12usize {
        for k in (1..=n).filter(|k| n % k == 0) {
            let f: Vec<bool> = (0..n).map(|i| i % k == 0).collect();
            let m = convolution_matrix(n, &f).unwrap();
            assert!(is_blocky(&m).unwrap().is_blocky(), "n = {n}, step {k}");
        }
    }
}
