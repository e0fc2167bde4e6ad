//! File formats: text and JSON matrices, decompositions, factorizations.
//!
//! Text matrices start with a header `m n kind` (`kind` is `int` or `real`)
//! followed by `m` lines of `n` whitespace-separated values. Blank lines and
//! lines starting with `#` are ignored. Real values are written with Rust's
//! shortest round-trip formatting, so a matrix survives a write/read cycle
//! bit for bit (including entries at exact half-integers, which round down).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blocky::{BlockyMatrix, Rectangle, Sign, SignedBlockySum, SignedTerm};
use crate::error::{input, Error, Result};
use crate::factorize::GammaFactorization;
use crate::matrix::{IntMatrix, RealMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Int,
    Real,
}

/// A matrix read from disk.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixData {
    Int(IntMatrix),
    Real(RealMatrix),
}

impl MatrixData {
    pub fn kind(&self) -> Kind {
        match self {
            MatrixData::Int(_) => Kind::Int,
            MatrixData::Real(_) => Kind::Real,
        }
    }

    pub fn to_real(&self) -> RealMatrix {
        match self {
            MatrixData::Int(a) => a.to_real(),
            MatrixData::Real(a) => a.clone(),
        }
    }

    /// The integer matrix, accepting real files whose entries are all integers.
    pub fn to_int(&self) -> Result<IntMatrix> {
        match self {
            MatrixData::Int(a) => Ok(a.clone()),
            MatrixData::Real(a) => {
                let mut data = Vec::with_capacity(a.as_slice().len());
                for (k, &v) in a.as_slice().iter().enumerate() {
                    if v.fract() != 0.0 || v.abs() > i64::MAX as f64 {
                        return Err(Error::EntryDomain {
                            row: k / a.cols(),
                            col: k % a.cols(),
                            value: v,
                            expected: "an integer",
                        });
                    }
                    data.push(v as i64);
                }
                IntMatrix::new(a.rows(), a.cols(), data)
            }
        }
    }
}

impl From<IntMatrix> for MatrixData {
    fn from(a: IntMatrix) -> Self {
        MatrixData::Int(a)
    }
}

impl From<RealMatrix> for MatrixData {
    fn from(a: RealMatrix) -> Self {
        MatrixData::Real(a)
    }
}

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_matrix_text(text: &str) -> Result<MatrixData> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| parse_error(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [m, n, kind] = fields[..] else {
        return Err(parse_error(hline, "header must be `m n kind`"));
    };
    let m: usize = m.parse().map_err(|_| parse_error(hline, format!("bad row count `{m}`")))?;
    let n: usize = n.parse().map_err(|_| parse_error(hline, format!("bad column count `{n}`")))?;
    let kind = match kind {
        "int" => Kind::Int,
        "real" => Kind::Real,
        other => return Err(parse_error(hline, format!("kind must be int or real, got `{other}`"))),
    };
    if m == 0 || n == 0 {
        return Err(parse_error(hline, "matrix dimensions must be positive"));
    }
    let mut ints = Vec::new();
    let mut reals = Vec::new();
    let mut seen_rows = 0;
    for (lineno, line) in lines {
        if seen_rows == m {
            return Err(parse_error(lineno, format!("more than {m} rows")));
        }
        let values: Vec<&str> = line.split_whitespace().collect();
        if values.len() != n {
            return Err(parse_error(lineno, format!("expected {n} values, found {}", values.len())));
        }
        for v in values {
            match kind {
                Kind::Int => ints.push(v.parse::<i64>().map_err(|_| parse_error(lineno, format!("`{v}` is not an integer")))?),
                Kind::Real => {
                    let x: f64 = v.parse().map_err(|_| parse_error(lineno, format!("`{v}` is not a number")))?;
                    if !x.is_finite() {
                        return Err(parse_error(lineno, format!("`{v}` is not finite")));
                    }
                    reals.push(x);
                }
            }
        }
        seen_rows += 1;
    }
    if seen_rows != m {
        return Err(parse_error(text.lines().count(), format!("expected {m} rows, found {seen_rows}")));
    }
    Ok(match kind {
        Kind::Int => MatrixData::Int(IntMatrix::new(m, n, ints)?),
        Kind::Real => MatrixData::Real(RealMatrix::new(m, n, reals)?),
    })
}

pub fn int_matrix_to_text(a: &IntMatrix) -> String {
    let mut s = format!("{} {} int\n", a.rows(), a.cols());
    for x in 0..a.rows() {
        let row: Vec<String> = a.row(x).iter().map(i64::to_string).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    s
}

pub fn real_matrix_to_text(a: &RealMatrix) -> String {
    let mut s = format!("{} {} real\n", a.rows(), a.cols());
    for x in 0..a.rows() {
        let row: Vec<String> = a.row(x).iter().map(|v| format!("{v:?}")).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    s
}

pub fn matrix_to_text(a: &MatrixData) -> String {
    match a {
        MatrixData::Int(a) => int_matrix_to_text(a),
        MatrixData::Real(a) => real_matrix_to_text(a),
    }
}

/// JSON matrix object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub kind: Kind,
    pub entries: Vec<Vec<serde_json::Number>>,
}

impl MatrixJson {
    pub fn from_data(a: &MatrixData) -> Self {
        match a {
            MatrixData::Int(a) => Self {
                rows: a.rows(),
                cols: a.cols(),
                kind: Kind::Int,
                entries: a.to_rows().into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect(),
            },
            MatrixData::Real(a) => Self {
                rows: a.rows(),
                cols: a.cols(),
                kind: Kind::Real,
                entries: a
                    .to_rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(|v| serde_json::Number::from_f64(v).expect("finite")).collect())
                    .collect(),
            },
        }
    }

    pub fn into_data(self) -> Result<MatrixData> {
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(Error::ShapeMismatch {
                expected: (self.rows, self.cols),
                found: (self.entries.len(), self.entries.first().map_or(0, Vec::len)),
            });
        }
        match self.kind {
            Kind::Int => {
                let rows = self
                    .entries
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|v| v.as_i64().ok_or_else(|| Error::Input(format!("`{v}` is not an integer"))))
                            .collect::<Result<Vec<i64>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(MatrixData::Int(IntMatrix::try_from_rows(&rows)?))
            }
            Kind::Real => {
                let rows: Vec<Vec<f64>> = self
                    .entries
                    .iter()
                    .map(|r| r.iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect())
                    .collect();
                Ok(MatrixData::Real(RealMatrix::try_from_rows(&rows)?))
            }
        }
    }
}

/// Parses either format; JSON is recognised by a leading `{`.
pub fn parse_matrix(text: &str) -> Result<MatrixData> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str::<MatrixJson>(text)?.into_data()
    } else {
        parse_matrix_text(text)
    }
}

/// Reads a whole file, naming the path on failure.
pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<MatrixData> {
    parse_matrix(&read_text(path)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleJson {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub sign: i64,
    pub rectangles: Vec<RectangleJson>,
}

/// JSON form of a signed blocky sum; indices are zero-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub shape: (usize, usize),
    pub terms: Vec<TermJson>,
}

impl From<&SignedBlockySum> for DecompositionJson {
    fn from(d: &SignedBlockySum) -> Self {
        Self {
            shape: d.shape(),
            terms: d
                .terms()
                .iter()
                .map(|t| TermJson {
                    sign: t.sign.value(),
                    rectangles: t
                        .blocky
                        .rectangles()
                        .iter()
                        .map(|r| RectangleJson {
                            rows: r.rows().to_vec(),
                            cols: r.cols().to_vec(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl DecompositionJson {
    pub fn into_sum(self) -> Result<SignedBlockySum> {
        let terms = self
            .terms
            .into_iter()
            .map(|t| {
                let rects = t
                    .rectangles
                    .into_iter()
                    .map(|r| Rectangle::new(r.rows, r.cols))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SignedTerm {
                    sign: Sign::from_value(t.sign)?,
                    blocky: BlockyMatrix::new(self.shape, rects)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SignedBlockySum::from_terms(self.shape, terms)
    }
}

pub fn decomposition_to_json(d: &SignedBlockySum) -> String {
    serde_json::to_string_pretty(&DecompositionJson::from(d)).expect("serializable")
}

pub fn parse_decomposition(text: &str) -> Result<SignedBlockySum> {
    serde_json::from_str::<DecompositionJson>(text)?.into_sum()
}

/// JSON form of a factorization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationJson {
    pub gamma: f64,
    pub residual: f64,
    #[serde(rename = "U")]
    pub u: Vec<Vec<f64>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<f64>>,
}

impl From<&GammaFactorization> for FactorizationJson {
    fn from(f: &GammaFactorization) -> Self {
        Self {
            gamma: f.gamma,
            residual: f.residual,
            u: f.u.to_rows(),
            v: f.v.to_rows(),
        }
    }
}

impl FactorizationJson {
    /// `cols` fixes the width of `V` when the inner dimension is zero.
    pub fn into_factorization(self, cols: usize) -> Result<GammaFactorization> {
        let u = RealMatrix::try_from_rows(&self.u)?;
        let u = if self.u.is_empty() { RealMatrix::zeros(0, 0) } else { u };
        let v = if self.v.is_empty() {
            RealMatrix::zeros(0, cols)
        } else {
            RealMatrix::try_from_rows(&self.v)?
        };
        if u.cols() != v.rows() {
            return input(format!("U is {:?} but V is {:?}", u.shape(), v.shape()));
        }
        if !(self.gamma >= 0.0 && self.residual >= 0.0) {
            return input("gamma and residual must be nonnegative");
        }
        Ok(GammaFactorization {
            u,
            v,
            gamma: self.gamma,
            residual: self.residual,
            certifying: true,
        })
    }
}

pub fn factorization_to_json(f: &GammaFactorization) -> String {
    serde_json::to_string_pretty(&FactorizationJson::from(f)).expect("serializable")
}

pub fn parse_factorization(text: &str, cols: usize) -> Result<GammaFactorization> {
    serde_json::from_str::<FactorizationJson>(text)?.into_factorization(cols)
}
