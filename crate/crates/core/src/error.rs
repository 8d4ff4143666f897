use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin: 2j must be a non-negative integer (got j = {j})")]
    InvalidSpin { j: f64 },

    #[error("invalid particle count: N must be >= {min} (got {n})")]
    InvalidParticleCount { n: u32, min: u32 },

    #[error("direction vector has near-zero length (|v| = {norm:.3e})")]
    ZeroDirection { norm: f64 },

    #[error("amplitude vector has length {got}, expected {expected}")]
    BadLength { expected: usize, got: usize },

    #[error("state is not normalized (|ψ|² deviates from 1 by {deviation:.3e})")]
    NotNormalized { deviation: f64 },

    #[error("matrix is not Hermitian (max |A - A†| entry = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("density matrix trace deviates from 1 by {deviation:.3e}")]
    NotUnitTrace { deviation: f64 },

    #[error("density matrix is not positive semi-definite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix is {rows}x{cols}, expected {expected}x{expected}")]
    BadDimension { expected: usize, rows: usize, cols: usize },

    #[error("frame vectors are not mutually orthogonal (max |n_i·n_k| = {max_dot:.3e})")]
    NonOrthogonalFrame { max_dot: f64 },

    #[error("projection μ = {mu} is not on the μ = -j..+j lattice for j = {j}")]
    MuOutOfRange { mu: f64, j: f64 },

    #[error("θ grid is empty")]
    EmptyGrid,

    #[error("θ grid must be ascending and within [0, π]")]
    BadGrid,

    #[error("no measurement outcomes supplied")]
    NoOutcomes,

    #[error("posterior vanished numerically (all likelihood mass underflowed)")]
    DegeneratePosterior,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
