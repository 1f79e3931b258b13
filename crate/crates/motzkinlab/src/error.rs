//! Error taxonomy shared by every module.
//!
//! Three failure classes matter to callers: bad input (caller mistake),
//! a size cap hit (instance too large for the requested method), and a
//! numerical method giving up (carries the best residual it reached).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("numerical failure: {message} (best residual {best_residual:.3e})")]
    Numerical { message: String, best_residual: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn limit(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }
}
