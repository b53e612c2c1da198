use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("undefined coefficient: {0}")]
    Undefined(String),
    /// The rewriting step budget ran out. With a correct rule table this
    /// cannot happen, so it points at a broken table.
    #[error("normal ordering exceeded {0} rewrite steps")]
    Watchdog(u64),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
