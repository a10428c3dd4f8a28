use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A computed object broke a property that the theory guarantees.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("resource limit exceeded at n={n}: needs {needed_bytes} bytes, limit {limit_bytes}")]
    ResourceLimit { n: usize, needed_bytes: u64, limit_bytes: u64 },

    #[error("{what} is capped at {cap}, requested {requested}")]
    CapExceeded { what: &'static str, requested: usize, cap: usize },

    /// A fixed-width fast path overflowed; callers retry with big integers.
    #[error("fixed-width overflow in {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn violated<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvariantViolation(msg.into()))
}
