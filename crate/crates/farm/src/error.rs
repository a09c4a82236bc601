use thiserror::Error;

#[derive(Debug, Error)]
pub enum FarmError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Store(#[from] quadstore::StoreError),
    #[error(transparent)]
    Fhat(#[from] fhat::FhatError),
    #[error("config error: {0}")]
    Config(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("peer rejected migration ({code}): {message}")]
    Rejected { code: String, message: String },
}

pub type Result<T> = std::result::Result<T, FarmError>;
