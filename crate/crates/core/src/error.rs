use thiserror::Error;

/// Errors produced by the blocky toolkit.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("entry ({row}, {col}) = {value} is not {expected}")]
    EntryDomain {
        row: usize,
        col: usize,
        value: f64,
        expected: &'static str,
    },

    #[error("exact recursion exceeded its budget of {budget} node expansions")]
    BudgetExceeded { budget: u64 },

    #[error("rounding safety violated at ({row}, {col}): value {value} is {distance} from integer {target}")]
    RoundingSafety {
        row: usize,
        col: usize,
        value: f64,
        target: i64,
        distance: f64,
    },

    #[error("averaged class value |<u, v_hat>| = {value} fell below 1/2 for class row {row}")]
    WeakAverage { row: usize, value: f64 },

    #[error("factorization does not certify the matrix: {0}")]
    InvalidFactorization(String),

    #[error("reconstruction mismatch at ({row}, {col}): expected {expected}, got {got}")]
    Reconstruction {
        row: usize,
        col: usize,
        expected: i64,
        got: i64,
    },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{}: {source}", path.display())]
    File {
        path: std::path::PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
