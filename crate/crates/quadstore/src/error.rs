use thiserror::Error;

use crate::term::Term;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StoreError {
    #[error("quota exceeded for graph {graph}: limit {limit}")]
    QuotaExceeded { graph: Term, limit: usize },
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error("syntax error at line {line}: {message}")]
    SyntaxError { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, StoreError>;
