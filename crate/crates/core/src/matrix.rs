//! Dense row-major matrices over the integers and the reals, plus the
//! half-down rounding used throughout the pipeline.

use std::fmt;

use crate::error::{input, Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return input(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        Ok(Self {
            rows,
            cols,
            data,
            row_labels: None,
            col_labels: None,
        })
    }

    /// Builds a matrix from nested rows. Panics on ragged input; use
    /// [`IntMatrix::try_from_rows`] for untrusted data.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        Self::try_from_rows(rows).expect("ragged rows")
    }

    pub fn try_from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(m * n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return input(format!("row {i} has {} entries, expected {n}", r.len()));
            }
            data.extend_from_slice(r);
        }
        Self::new(m, n, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![0; rows * cols]).unwrap()
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![1; rows * cols]).unwrap()
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn with_labels(mut self, rows: Option<Vec<String>>, cols: Option<Vec<String>>) -> Result<Self> {
        if rows.as_ref().is_some_and(|l| l.len() != self.rows) {
            return input("row label count does not match row count");
        }
        if cols.as_ref().is_some_and(|l| l.len() != self.cols) {
            return input("column label count does not match column count");
        }
        self.row_labels = rows;
        self.col_labels = cols;
        Ok(self)
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_boolean(&self) -> bool {
        self.data.iter().all(|&v| v == 0 || v == 1)
    }

    pub fn is_sign(&self) -> bool {
        self.data.iter().all(|&v| v == 1 || v == -1)
    }

    pub fn is_zero_column(&self, c: usize) -> bool {
        (0..self.rows).all(|r| self.get(r, c) == 0)
    }

    /// Largest row l1 norm, `max_x sum_y |A(x,y)|`.
    pub fn max_row_l1(&self) -> i64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|v| v.abs()).sum())
            .max()
            .unwrap_or(0)
    }

    /// Restriction to the given columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            data.extend(cols.iter().map(|&c| self.get(r, c)));
        }
        IntMatrix::new(self.rows, cols.len(), data).unwrap()
    }

    /// Restriction to the given rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            data.extend(cols.iter().map(|&c| self.get(r, c)));
        }
        IntMatrix::new(rows.len(), cols.len(), data).unwrap()
    }

    /// Embeds this matrix in the top-left corner of a larger zero matrix.
    pub fn padded(&self, rows: usize, cols: usize) -> Result<IntMatrix> {
        if rows < self.rows || cols < self.cols {
            return input("padding target is smaller than the matrix");
        }
        let mut out = IntMatrix::zeros(rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &IntMatrix, f: impl Fn(i64, i64) -> i64) -> Result<IntMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        IntMatrix::new(self.rows, self.cols, data)
    }

    /// Positive and negative parts, `A = A+ - A-`.
    pub fn split_signs(&self) -> (IntMatrix, IntMatrix) {
        let pos = self.data.iter().map(|&v| v.max(0)).collect();
        let neg = self.data.iter().map(|&v| (-v).max(0)).collect();
        (
            IntMatrix::new(self.rows, self.cols, pos).unwrap(),
            IntMatrix::new(self.rows, self.cols, neg).unwrap(),
        )
    }

    /// Maps `{0,1}` to `{-1,+1}` (0 -> -1).
    pub fn boolean_to_sign(&self) -> Result<IntMatrix> {
        self.check_boolean()?;
        let data = self.data.iter().map(|&v| 2 * v - 1).collect();
        IntMatrix::new(self.rows, self.cols, data)
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix::new(self.rows, self.cols, self.data.iter().map(|&v| v as f64).collect()).unwrap()
    }

    pub(crate) fn check_boolean(&self) -> Result<()> {
        self.check_domain(|v| v == 0 || v == 1, "boolean")
    }

    pub(crate) fn check_sign(&self) -> Result<()> {
        self.check_domain(|v| v == 1 || v == -1, "a sign (+1/-1)")
    }

    fn check_domain(&self, ok: impl Fn(i64) -> bool, expected: &'static str) -> Result<()> {
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if !ok(v) {
                    return Err(Error::EntryDomain {
                        row: r,
                        col: c,
                        value: v as f64,
                        expected,
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| format!("{v:>3}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

/// Dense row-major real matrix with a cached max-norm.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    max_abs: f64,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return input(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::EntryDomain {
                row: i / cols.max(1),
                col: i % cols.max(1),
                value: data[i],
                expected: "finite",
            });
        }
        let max_abs = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Self {
            rows,
            cols,
            data,
            max_abs,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        Self::try_from_rows(rows).expect("ragged or non-finite rows")
    }

    pub fn try_from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(m * n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return input(format!("row {i} has {} entries, expected {n}", r.len()));
            }
            data.extend_from_slice(r);
        }
        Self::new(m, n, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![0.0; rows * cols]).unwrap()
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// `‖A‖_max`.
    #[inline]
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn select_cols(&self, cols: &[usize]) -> RealMatrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            data.extend(cols.iter().map(|&c| self.get(r, c)));
        }
        RealMatrix::new(self.rows, cols.len(), data).unwrap()
    }

    pub fn checked_sub(&self, other: &RealMatrix) -> Result<RealMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        RealMatrix::new(self.rows, self.cols, data)
    }

    /// Max-norm distance to another matrix of the same shape.
    pub fn max_diff(&self, other: &RealMatrix) -> Result<f64> {
        Ok(self.checked_sub(other)?.max_abs())
    }

    /// Rounds every entry to the nearest integer, half-integers down.
    pub fn round(&self) -> (IntMatrix, AlmostIntegerCertificate) {
        round_to_integers(self)
    }
}

/// Rounds to the nearest integer with `b + 1/2` mapped down to `b`.
#[inline]
pub fn round_half_down(a: f64) -> i64 {
    (a - 0.5).ceil() as i64
}

/// Measured distance of a real matrix from its rounding.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AlmostIntegerCertificate {
    pub eps: f64,
}

/// Entrywise half-down rounding plus the measured `‖A - A_Z‖_max`.
pub fn round_to_integers(a: &RealMatrix) -> (IntMatrix, AlmostIntegerCertificate) {
    let mut eps = 0.0f64;
    let data = a
        .as_slice()
        .iter()
        .map(|&v| {
            let z = round_half_down(v);
            eps = eps.max((v - z as f64).abs());
            z
        })
        .collect();
    (
        IntMatrix::new(a.rows(), a.cols(), data).unwrap(),
        AlmostIntegerCertificate { eps },
    )
}

/// Convolution matrix over the cyclic group `Z_n`: entry `(x, y)` is
/// `f((x - y) mod n)`.
pub fn convolution_matrix(n: usize, f: &[bool]) -> Result<IntMatrix> {
    if n == 0 {
        return input("group order must be positive");
    }
    if f.len() != n {
        return input(format!("f must have {n} entries, got {}", f.len()));
    }
    let mut out = IntMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            out.set(x, y, f[(x + n - y) % n] as i64);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integers_round_down() {
        let (z, cert) = round_to_integers(&RealMatrix::from_rows(&[[0.5]]));
        assert_eq!(z, IntMatrix::from_rows(&[[0]]));
        assert_eq!(cert.eps, 0.5);
        assert_eq!(round_half_down(-0.5), -1);
        assert_eq!(round_half_down(1.5), 1);
        assert_eq!(round_half_down(2.5000001), 3);
    }

    #[test]
    fn nearest_integer_rounding() {
        let (z, cert) = round_to_integers(&RealMatrix::from_rows(&[[1.4, -0.4]]));
        assert_eq!(z, IntMatrix::from_rows(&[[1, 0]]));
        assert!((cert.eps - 0.4).abs() < 1e-15);
    }

    #[test]
    fn integer_matrices_round_to_themselves() {
        let a = IntMatrix::from_rows(&[[3, -2], [0, 7]]);
        let (z, cert) = a.to_real().round();
        assert_eq!(z, a);
        assert_eq!(cert.eps, 0.0);
    }

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(IntMatrix::try_from_rows(&[vec![1, 2], vec![3]]).is_err());
        assert!(RealMatrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(IntMatrix::new(2, 2, vec![1]).is_err());
    }

    #[test]
    fn convolution_examples() {
        assert_eq!(convolution_matrix(3, &[true; 3]).unwrap(), IntMatrix::ones(3, 3));
        assert_eq!(
            convolution_matrix(4, &[true, false, false, false]).unwrap(),
            IntMatrix::identity(4)
        );
        let c = convolution_matrix(4, &[true, false, true, false]).unwrap();
        assert_eq!(c.row(1), &[0, 1, 0, 1]);
        assert!(convolution_matrix(0, &[]).is_err());
    }

    #[test]
    fn sign_split_recombines() {
        let a = IntMatrix::from_rows(&[[2, -1], [0, -3]]);
        let (p, n) = a.split_signs();
        assert_eq!(p.checked_sub(&n).unwrap(), a);
        assert_eq!(a.max_row_l1(), 3);
    }
}
