use thiserror::Error;

use crate::index::IndexId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("entry ({row}, {col}) is negative ({value})")]
    NegativeEntry { row: usize, col: usize, value: i64 },
    #[error("row {row} sums to zero: every class needs at least one test point")]
    EmptyRow { row: usize },
    #[error("matrix is not square: row {row} has {found} entries, expected {expected}")]
    NonSquare {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("a confusion matrix needs at least 2 classes, found {found}")]
    TooFewClasses { found: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("scaling row {row} by {factor} makes entry ({row}, {col}) non-integral")]
    NonIntegerResult {
        row: usize,
        col: usize,
        factor: String,
    },
    #[error("scaling factor {position} must be a positive rational")]
    NonPositiveFactor { position: usize },
    #[error("class count at position {position} is zero")]
    ZeroClassCount { position: usize },
    #[error("unknown label `{label}` on record {record}")]
    UnknownLabel { label: String, record: usize },
    #[error("{index} is a two-class index but the matrix has {found} classes")]
    NotTwoClass { index: IndexId, found: usize },
    #[error("the lower bound of {index} depends on the test-set profile; supply per-class counts")]
    ProfileRequired { index: IndexId },
    #[error("enumeration needs {required} matrices, budget is {budget}")]
    BudgetExceeded { required: String, budget: u64 },
    #[error("cannot realise {what} with integral counts")]
    IntegralityImpossible { what: String },
    #[error("target class ratio {target} is not reachable by subsampling: {detail}")]
    UnachievableRrt { target: String, detail: String },
    #[error("{index} is undefined along the collapse family at epsilon {epsilon}: {reason}")]
    UndefinedAlongFamily {
        index: IndexId,
        epsilon: String,
        reason: String,
    },
    #[error("invalid epsilon schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid experiment spec at `{path}`: {message}")]
    InvalidSpec { path: String, message: String },
    #[error("unknown index id `{0}`")]
    UnknownIndex(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
