use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty term")]
    EmptyTerm,

    #[error("empty query")]
    EmptyQuery,

    #[error("unknown term: {0}")]
    UnknownTerm(String),

    #[error("normalized value out of range: {0}")]
    OutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("unsupported snapshot version: {0}")]
    UnsupportedSnapshotVersion(String),

    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
