//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not an orthonormal family: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotOrthonormal { defect: f64, tol: f64 },

    #[error("matrix is not unitary: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("block structure detection failed: {0}")]
    StructureDetection(String),

    #[error("subalgebra is not homogeneously balanced: {0}")]
    NotBalanced(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("parameter {requested} exceeds supported maximum {max}")]
    TooLarge { requested: u64, max: u64 },

    #[error("unknown certificate preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("schema error in {path}: {message}")]
    Schema { path: String, message: String },

    #[error("invariant violation in algebra `{algebra}`: {check}")]
    InvariantViolation { algebra: String, check: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
