use thiserror::Error;

/// Errors raised across the library. Each variant maps onto a CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("illegal action `{action}` at state `{state}`")]
    IllegalAction { state: String, action: String },

    #[error("strategy has no entry for information set `{0}`")]
    MissingInfoset(String),

    #[error("value function has no entry for part `{part}` action `{action}`")]
    MissingValue { part: String, action: String },

    #[error("data corruption: {0}")]
    DataCorruption(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Statistics(String),

    #[error("oracle check failed: {0}")]
    OracleFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn corruption(msg: impl Into<String>) -> Self {
        Error::DataCorruption(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DataCorruption(_) | Error::Parse { .. } | Error::MissingInfoset(_) => 2,
            Error::MissingValue { .. } => 2,
            Error::OracleFailure(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
