use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operation requires a qubit factor but the space has none")]
    NoQubit,

    #[error("operation requires a space without a qubit factor")]
    UnexpectedQubit,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix exponential overflow: {0}")]
    Overflow(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("trace drifted by {drift:e} at t = {t}; reduce the step size")]
    TraceDrift { t: f64, drift: f64 },

    #[error("norm drifted by {drift:e} at t = {t}; reduce the step size")]
    NormDrift { t: f64, drift: f64 },

    #[error("quadrature did not converge: change {change:e} after doubling to {points} points")]
    QuadratureNotConverged { points: usize, change: f64 },

    #[error("unknown model id `{0}`; valid ids: {1}")]
    UnknownModel(String, String),

    #[error("unknown suite id `{0}`; valid suites: {1}")]
    UnknownSuite(String, String),

    #[error("unknown generator id `{0}`; valid generators: {1}")]
    UnknownGenerator(String, String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
