use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants carry the measured violation so callers can report how far an
/// input was from satisfying the relevant invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, found {found_rows}x{found_cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        found_rows: usize,
        found_cols: usize,
    },

    #[error("entry buffer has length {found}, expected {expected}")]
    BadLength { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: ||A - A^dag||_F = {defect:e}")]
    NotHermitian { defect: f64 },

    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("columns are not orthonormal: ||C^dag C - I||_F = {defect:e}")]
    NotOrthonormal { defect: f64 },

    #[error("basis completion found only {found} of {needed} extra vectors")]
    RankDeficient { found: usize, needed: usize },

    #[error("trace is not one: |tr - 1| = {defect:e}")]
    TraceNotOne { defect: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("invalid dimensions {m}x{n}: both factors must be at least 2")]
    InvalidDims { m: usize, n: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),

    #[error("invalid rank {rank}: must lie in 1..={max}")]
    InvalidRank { rank: usize, max: usize },

    #[error("vector is not normalized: ||psi|| = {norm}")]
    NotNormalized { norm: f64 },

    #[error("states live on different bipartitions: {m1}x{n1} vs {m2}x{n2}")]
    DimsMismatch {
        m1: usize,
        n1: usize,
        m2: usize,
        n2: usize,
    },
}

pub type Result<T> = core::result::Result<T, Error>;
