use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file / text.
    #[error("parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },

    /// A precondition of the requested operation does not hold.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation would exceed a configured resource budget.
    #[error("resource budget exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Error {
        Error::Domain(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Error {
        Error::Resource(msg.into())
    }
}
