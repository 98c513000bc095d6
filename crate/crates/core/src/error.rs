use thiserror::Error;

/// Errors produced by matrix construction, factorization and I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MmfError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix dimension must be positive")]
    EmptyMatrix,

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("index ({row}, {col}) out of range for dimension {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },

    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("index set is invalid: {0}")]
    InvalidIndexSet(String),

    #[error("index set is empty")]
    EmptyIndexSet,

    #[error("matrix has zero Frobenius norm")]
    ZeroMatrix,

    #[error("matrix is not symmetric (defect {defect:e} exceeds {tolerance:e})")]
    NotSymmetric { defect: f64, tolerance: f64 },

    #[error("matrix is not skew-symmetric (defect {defect:e} exceeds {tolerance:e})")]
    NotSkew { defect: f64, tolerance: f64 },

    #[error("core size {d} out of range 1..={n}")]
    CoreSizeOutOfRange { d: usize, n: usize },

    #[error("rank {r} out of range 1..={n}")]
    RankOutOfRange { r: usize, n: usize },

    #[error("storage budget of {budget} scalars is below the minimum of {minimum}")]
    BudgetTooSmall { budget: u64, minimum: u64 },

    #[error("invalid decay specification: {0}")]
    InvalidDecay(String),

    #[error("Matrix Market parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported Matrix Market content: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, MmfError>;
