use thiserror::Error;

use crate::ast::Pos;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NenoError {
    #[error("syntax error at {pos}: expected {expected}, found {found}")]
    SyntaxError {
        pos: Pos,
        expected: String,
        found: String,
    },
    #[error("unknown prefix '{prefix}:' at line {line}")]
    UnknownPrefix { prefix: String, line: usize },
    #[error("type mismatch at {pos}: expected {expected}, found {found}")]
    TypeMismatch {
        expected: String,
        found: String,
        pos: Pos,
    },
    #[error("unknown field {predicate} on {class} at {pos}")]
    UnknownField {
        predicate: String,
        class: String,
        pos: Pos,
    },
    #[error("wrong number of arguments to {method} at {pos}")]
    ArityError { method: String, pos: Pos },
    #[error("unknown method {method} at {pos}")]
    UnknownMethod { method: String, pos: Pos },
    #[error("unknown variable {name} at {pos}")]
    UnknownVariable { name: String, pos: Pos },
    #[error("cardinality error at {pos}: {message}")]
    CardinalityError { message: String, pos: Pos },
    #[error("declaration error at {pos}: {message}")]
    DeclError { message: String, pos: Pos },
}

pub type Result<T> = std::result::Result<T, NenoError>;
