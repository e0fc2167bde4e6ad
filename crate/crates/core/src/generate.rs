//! Seeded matrix generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blocky::{BlockyMatrix, Rectangle, Sign, SignedBlockySum};
use crate::error::{input, Error, Result};
use crate::factorize::{factorization_from_blocky_sum, verify_factorization, GammaFactorization};
use crate::matrix::{convolution_matrix, IntMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    RandomBoolean { rows: usize, cols: usize, density: f64 },
    /// Sum of `terms` random signed blocky matrices.
    RandomBlockySum { rows: usize, cols: usize, terms: usize },
    /// `M(x, y) = f(x − y mod n)` with `f` the indicator of `support`.
    ConvolutionCyclic { n: usize, support: Vec<usize> },
    Identity { n: usize },
    AllOnes { rows: usize, cols: usize },
}

/// A generated matrix, with its blocky sum and exact certificate when known.
#[derive(Clone, Debug)]
pub struct Generated {
    pub matrix: IntMatrix,
    pub sum: Option<SignedBlockySum>,
    pub factorization: Option<GammaFactorization>,
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return input(format!("{name} must be positive"));
    }
    Ok(())
}

/// A random nonzero blocky matrix: rows and columns are dealt into `k + 1`
/// groups (group 0 is left out) and group `i` of rows meets group `i` of
/// columns.
pub fn random_blocky(rng: &mut impl Rng, rows: usize, cols: usize) -> BlockyMatrix {
    loop {
        let k = rng.gen_range(1..=rows.min(cols));
        let row_group: Vec<usize> = (0..rows).map(|_| rng.gen_range(0..=k)).collect();
        let col_group: Vec<usize> = (0..cols).map(|_| rng.gen_range(0..=k)).collect();
        let rects: Vec<Rectangle> = (1..=k)
            .filter_map(|g| {
                let r: Vec<usize> = (0..rows).filter(|&x| row_group[x] == g).collect();
                let c: Vec<usize> = (0..cols).filter(|&y| col_group[y] == g).collect();
                Rectangle::new(r, c).ok()
            })
            .collect();
        if !rects.is_empty() {
            return BlockyMatrix::new((rows, cols), rects).expect("groups are disjoint");
        }
    }
}

/// Deterministic in `(spec, seed)`.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plain = |matrix| Generated {
        matrix,
        sum: None,
        factorization: None,
    };
    match spec {
        GeneratorSpec::RandomBoolean { rows, cols, density } => {
            positive("rows", *rows)?;
            positive("cols", *cols)?;
            if !(0.0..=1.0).contains(density) {
                return input(format!("density must lie in [0, 1], got {density}"));
            }
            let data = (0..rows * cols).map(|_| rng.gen_bool(*density) as i64).collect();
            Ok(plain(IntMatrix::new(*rows, *cols, data)?))
        }
        GeneratorSpec::RandomBlockySum { rows, cols, terms } => {
            positive("rows", *rows)?;
            positive("cols", *cols)?;
            let mut sum = SignedBlockySum::new((*rows, *cols));
            for _ in 0..*terms {
                let sign = *[Sign::Plus, Sign::Minus].choose(&mut rng).unwrap();
                sum.push(sign, random_blocky(&mut rng, *rows, *cols))?;
            }
            let matrix = sum.evaluate();
            let f = factorization_from_blocky_sum(&sum);
            let check = verify_factorization(&matrix.to_real(), &f, 1e-9)?;
            if !check.valid {
                return Err(Error::InvalidFactorization(format!("generated certificate failed: {check:?}")));
            }
            Ok(Generated {
                matrix,
                sum: Some(sum),
                factorization: Some(f),
            })
        }
        GeneratorSpec::ConvolutionCyclic { n, support } => {
            positive("n", *n)?;
            let mut f = vec![false; *n];
            for &s in support {
                if s >= *n {
                    return input(format!("support element {s} is outside Z_{n}"));
                }
                f[s] = true;
            }
            Ok(plain(convolution_matrix(*n, &f)?))
        }
        GeneratorSpec::Identity { n } => {
            positive("n", *n)?;
            Ok(plain(IntMatrix::identity(*n)))
        }
        GeneratorSpec::AllOnes { rows, cols } => {
            positive("rows", *rows)?;
            positive("cols", *cols)?;
            Ok(plain(IntMatrix::ones(*rows, *cols)))
        }
    }
}
