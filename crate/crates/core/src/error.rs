use thiserror::Error;

/// Errors raised anywhere in the simulation and training stack.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid construction arguments (qubit counts, depths, rates, grids).
    #[error("configuration error: {0}")]
    Config(String),

    /// Shape or index mismatch between otherwise valid objects.
    #[error("structural error: {0}")]
    Structural(String),

    /// An operation was called outside its contract.
    #[error("usage error: {0}")]
    Usage(String),

    /// Argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request would exceed the memory or size limits of the dense solver.
    #[error("resource error: {0}")]
    Resource(String),

    /// Training produced a non-finite cost.
    #[error("numerical abort at epoch {epoch}: {detail}")]
    Numerical { epoch: usize, detail: String },

    /// An internal invariant was violated (e.g. complex expectation value).
    #[error("internal consistency error: {0}")]
    Consistency(String),

    /// Malformed file contents (checkpoints, config).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
