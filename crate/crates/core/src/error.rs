use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order {0} is not a positive odd integer")]
    InvalidOrder(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("n = {n} exceeds the enumeration limit {limit}")]
    OracleLimitExceeded { n: usize, limit: usize },
    #[error("the trade is empty: all {0} cells of each transversal are stable")]
    EmptyTrade(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("decode error: {0}")]
    Decode(String),
    #[error("no construction: {0}")]
    NoConstruction(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
