use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An exact-integer quantity does not fit the supported width.
    #[error("range error: {0}")]
    Range(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A desk-scale size guard was exceeded.
    #[error("size guard exceeded: {0}")]
    Guard(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("coincident points: minimal torus distance is zero")]
    CoincidentPoints,

    #[error("character {0} is not primitive")]
    NotPrimitive(usize),

    #[error("cache file is malformed: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
