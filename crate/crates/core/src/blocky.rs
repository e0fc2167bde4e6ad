//! Blocky matrices and signed sums of them.
//!
//! A boolean matrix is blocky when its support is a disjoint union of
//! combinatorial rectangles `S_i × T_i` whose row sets are pairwise disjoint
//! and whose column sets are pairwise disjoint. Equivalently, no 2×2
//! submatrix has exactly three 1-entries.

use std::collections::HashMap;

use crate::error::{input, Error, Result};
use crate::matrix::IntMatrix;

/// A combinatorial rectangle `rows × cols`, both index lists sorted and
/// nonempty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rectangle {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Rectangle {
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Result<Self> {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        if rows.is_empty() || cols.is_empty() {
            return input("rectangles must have nonempty row and column sets");
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn area(&self) -> usize {
        self.rows.len() * self.cols.len()
    }
}

/// Boolean blocky matrix stored as its rectangle list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockyMatrix {
    shape: (usize, usize),
    rects: Vec<Rectangle>,
}

impl BlockyMatrix {
    /// Validates index ranges and pairwise disjointness of row and column
    /// sets.
    pub fn new(shape: (usize, usize), rects: Vec<Rectangle>) -> Result<Self> {
        let (m, n) = shape;
        let mut row_owner = vec![false; m];
        let mut col_owner = vec![false; n];
        for rect in &rects {
            for &r in &rect.rows {
                if r >= m {
                    return input(format!("row index {r} out of range for {m} rows"));
                }
                if std::mem::replace(&mut row_owner[r], true) {
                    return input(format!("row {r} appears in two rectangles"));
                }
            }
            for &c in &rect.cols {
                if c >= n {
                    return input(format!("column index {c} out of range for {n} columns"));
                }
                if std::mem::replace(&mut col_owner[c], true) {
                    return input(format!("column {c} appears in two rectangles"));
                }
            }
        }
        Ok(Self { shape, rects })
    }

    pub fn zero(shape: (usize, usize)) -> Self {
        Self { shape, rects: Vec::new() }
    }

    /// Single rectangle covering the given rows and columns.
    pub fn single(shape: (usize, usize), rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        Self::new(shape, vec![Rectangle::new(rows, cols)?])
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn rectangles(&self) -> &[Rectangle] {
        &self.rects
    }

    pub fn is_zero(&self) -> bool {
        self.rects.is_empty()
    }

    /// Number of 1-entries.
    pub fn support_size(&self) -> usize {
        self.rects.iter().map(Rectangle::area).sum()
    }

    /// Expands to a dense 0/1 matrix.
    pub fn to_matrix(&self) -> IntMatrix {
        blocky_to_matrix(self)
    }

    fn add_into(&self, acc: &mut IntMatrix, sign: i64) {
        for rect in &self.rects {
            for &r in &rect.rows {
                for &c in &rect.cols {
                    acc.set(r, c, acc.get(r, c) + sign);
                }
            }
        }
    }
}

pub fn blocky_to_matrix(b: &BlockyMatrix) -> IntMatrix {
    let mut out = IntMatrix::zeros(b.shape.0, b.shape.1);
    b.add_into(&mut out, 1);
    out
}

/// Outcome of [`is_blocky`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockyCheck {
    /// The matrix is blocky; carries the canonical rectangle list (one
    /// rectangle per distinct nonzero row support, ordered by smallest row).
    Blocky(BlockyMatrix),
    /// A 2×2 submatrix with exactly three 1-entries.
    Witness { rows: [usize; 2], cols: [usize; 2] },
}

impl BlockyCheck {
    pub fn is_blocky(&self) -> bool {
        matches!(self, BlockyCheck::Blocky(_))
    }
}

/// Decides whether a 0/1 matrix is blocky.
pub fn is_blocky(b: &IntMatrix) -> Result<BlockyCheck> {
    b.check_boolean()?;
    let (m, n) = b.shape();
    // (support, rows sharing it)
    let mut classes: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    for r in 0..m {
        let support: Vec<usize> = (0..n).filter(|&c| b.get(r, c) == 1).collect();
        if support.is_empty() {
            continue;
        }
        match index.get(&support) {
            Some(&k) => classes[k].1.push(r),
            None => {
                index.insert(support.clone(), classes.len());
                classes.push((support, vec![r]));
            }
        }
    }
    // Distinct supports must be disjoint.
    let mut col_class: Vec<Option<usize>> = vec![None; n];
    for (k, (support, _)) in classes.iter().enumerate() {
        for &c in support {
            if let Some(j) = col_class[c] {
                return Ok(three_ones_witness(b, classes[j].1[0], classes[k].1[0], c));
            }
            col_class[c] = Some(k);
        }
    }
    let rects = classes
        .into_iter()
        .map(|(cols, rows)| Rectangle { rows, cols })
        .collect();
    Ok(BlockyCheck::Blocky(BlockyMatrix { shape: (m, n), rects }))
}

// Rows r1 != r2 share column c but have different supports.
fn three_ones_witness(b: &IntMatrix, r1: usize, r2: usize, c: usize) -> BlockyCheck {
    let d = (0..b.cols())
        .find(|&d| b.get(r1, d) != b.get(r2, d))
        .expect("distinct supports differ somewhere");
    let mut rows = [r1, r2];
    rows.sort_unstable();
    let mut cols = [c, d];
    cols.sort_unstable();
    BlockyCheck::Witness { rows, cols }
}

/// Sign of a term in a [`SignedBlockySum`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => input(format!("sign must be +1 or -1, got {v}")),
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedTerm {
    pub sign: Sign,
    pub blocky: BlockyMatrix,
}

/// Ordered list of signed blocky terms sharing one ambient shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedBlockySum {
    shape: (usize, usize),
    terms: Vec<SignedTerm>,
}

impl SignedBlockySum {
    pub fn new(shape: (usize, usize)) -> Self {
        Self { shape, terms: Vec::new() }
    }

    pub fn from_terms(shape: (usize, usize), terms: Vec<SignedTerm>) -> Result<Self> {
        let mut sum = Self::new(shape);
        for t in terms {
            sum.push(t.sign, t.blocky)?;
        }
        Ok(sum)
    }

    pub fn push(&mut self, sign: Sign, blocky: BlockyMatrix) -> Result<()> {
        if blocky.shape() != self.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape,
                found: blocky.shape(),
            });
        }
        self.terms.push(SignedTerm { sign, blocky });
        Ok(())
    }

    /// Appends all terms of `other`.
    pub fn extend(&mut self, other: SignedBlockySum) -> Result<()> {
        if other.shape != self.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape,
                found: other.shape,
            });
        }
        self.terms.extend(other.terms);
        Ok(())
    }

    /// The same terms with every sign flipped.
    pub fn negated(mut self) -> Self {
        for t in &mut self.terms {
            t.sign = t.sign.flip();
        }
        self
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn terms(&self) -> &[SignedTerm] {
        &self.terms
    }

    /// Term count `L`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self) -> IntMatrix {
        let mut acc = IntMatrix::zeros(self.shape.0, self.shape.1);
        for t in &self.terms {
            t.blocky.add_into(&mut acc, t.sign.value());
        }
        acc
    }
}

/// Exact entrywise evaluation of `Σ σ_i B_i`.
pub fn evaluate_sum(d: &SignedBlockySum) -> Result<IntMatrix> {
    if let Some(t) = d.terms.iter().find(|t| t.blocky.shape() != d.shape) {
        return Err(Error::ShapeMismatch {
            expected: d.shape,
            found: t.blocky.shape(),
        });
    }
    Ok(d.evaluate())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(rows: &[usize], cols: &[usize]) -> Rectangle {
        Rectangle::new(rows.to_vec(), cols.to_vec()).unwrap()
    }

    #[test]
    fn identity_is_blocky() {
        let check = is_blocky(&IntMatrix::identity(2)).unwrap();
        let BlockyCheck::Blocky(b) = check else { panic!("identity must be blocky") };
        assert_eq!(b.rectangles(), &[rect(&[0], &[0]), rect(&[1], &[1])]);
    }

    #[test]
    fn three_ones_gives_witness() {
        let check = is_blocky(&IntMatrix::from_rows(&[[1, 0], [1, 1]])).unwrap();
        assert_eq!(
            check,
            BlockyCheck::Witness {
                rows: [0, 1],
                cols: [0, 1]
            }
        );
    }

    #[test]
    fn zero_matrix_has_no_rectangles() {
        let BlockyCheck::Blocky(b) = is_blocky(&IntMatrix::zeros(3, 3)).unwrap() else {
            panic!()
        };
        assert!(b.is_zero());
    }

    #[test]
    fn non_boolean_rejected() {
        assert!(is_blocky(&IntMatrix::from_rows(&[[2]])).is_err());
    }

    #[test]
    fn canonical_rectangles_group_rows_by_support() {
        let a = IntMatrix::from_rows(&[[0, 1, 0, 1], [1, 0, 0, 0], [0, 1, 0, 1], [0, 0, 0, 0]]);
        let BlockyCheck::Blocky(b) = is_blocky(&a).unwrap() else { panic!() };
        assert_eq!(b.rectangles(), &[rect(&[0, 2], &[1, 3]), rect(&[1], &[0])]);
        assert_eq!(b.to_matrix(), a);
    }

    #[test]
    fn expansion_examples() {
        let b = BlockyMatrix::single((2, 2), vec![0, 1], vec![0]).unwrap();
        assert_eq!(b.to_matrix(), IntMatrix::from_rows(&[[1, 0], [1, 0]]));
        assert_eq!(BlockyMatrix::zero((2, 2)).to_matrix(), IntMatrix::zeros(2, 2));
        let d = BlockyMatrix::new((2, 2), vec![rect(&[0], &[0]), rect(&[1], &[1])]).unwrap();
        assert_eq!(d.to_matrix(), IntMatrix::identity(2));
    }

    #[test]
    fn overlapping_rectangles_rejected() {
        assert!(BlockyMatrix::new((2, 2), vec![rect(&[0], &[0]), rect(&[0], &[1])]).is_err());
        assert!(BlockyMatrix::new((2, 2), vec![rect(&[0], &[0]), rect(&[1], &[0])]).is_err());
        assert!(BlockyMatrix::new((2, 2), vec![rect(&[2], &[0])]).is_err());
        assert!(Rectangle::new(vec![], vec![0]).is_err());
    }

    #[test]
    fn signed_sum_examples() {
        let shape = (2, 2);
        let mut d = SignedBlockySum::new(shape);
        d.push(Sign::Plus, BlockyMatrix::single(shape, vec![0, 1], vec![0]).unwrap())
            .unwrap();
        d.push(Sign::Plus, BlockyMatrix::single(shape, vec![1], vec![1]).unwrap())
            .unwrap();
        assert_eq!(evaluate_sum(&d).unwrap(), IntMatrix::from_rows(&[[1, 0], [1, 1]]));

        let full = BlockyMatrix::single(shape, vec![0, 1], vec![0, 1]).unwrap();
        let mut one = SignedBlockySum::new(shape);
        one.push(Sign::Plus, full.clone()).unwrap();
        assert_eq!(one.evaluate(), IntMatrix::ones(2, 2));
        one.push(Sign::Minus, full).unwrap();
        assert_eq!(one.evaluate(), IntMatrix::zeros(2, 2));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut d = SignedBlockySum::new((2, 2));
        assert!(d.push(Sign::Plus, BlockyMatrix::zero((3, 2))).is_err());
    }
}
