use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |m - m^H| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e}, total violation {violation:.3e})")]
    NotPositive { min_eigenvalue: f64, violation: f64 },

    #[error("trace is {trace} (expected 1, deviation {deviation:.3e})")]
    TraceNotOne { trace: f64, deviation: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("operator dimension {requested} exceeds the size cap {cap}")]
    SizeOverflow { requested: usize, cap: usize },

    #[error("rank {rank} outside [1, {max}]")]
    BadRank { rank: usize, max: usize },

    #[error("invalid permutation specification: {0}")]
    InvalidPermutation(String),

    #[error("radicand of Q is {radicand:.3e}, below the roundoff floor")]
    NegativeRadicand { radicand: f64 },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),

    #[error("optimizer did not converge after {restarts} restarts (best value {best:.6e})")]
    DidNotConverge { restarts: usize, best: f64 },

    #[error("matrix is not unitary (max |U^H U - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outside the closed-form regime: {0}")]
    RegimeViolation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
