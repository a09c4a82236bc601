use thiserror::Error;

#[derive(Debug, Error)]
pub enum FhatError {
    #[error(transparent)]
    Store(#[from] quadstore::StoreError),
    #[error("malformed state: {0}")]
    MalformedState(String),
    #[error("no class {0} in API graph")]
    NoSuchClass(String),
    #[error("no method {method} on {target}")]
    NoSuchMethod { target: String, method: String },
    #[error("memo conflict for ({function}, {input}): recorded {recorded}, got {offered}")]
    MemoConflict {
        function: String,
        input: String,
        recorded: String,
        offered: String,
    },
}

pub type Result<T> = std::result::Result<T, FhatError>;
