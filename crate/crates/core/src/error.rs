use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller supplied an argument outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A text or binary dataset could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A binary file is malformed, truncated, or fails its integrity check.
    #[error("format error: {0}")]
    Format(String),

    /// The requested accuracy cannot be reached in the parameter regime of the advisor.
    #[error("regime infeasible: {0}")]
    RegimeInfeasible(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 1,
            Error::Parse { .. } | Error::Format(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::RegimeInfeasible(_) => 3,
        }
    }
}
