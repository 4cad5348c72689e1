use crate::graph::Vertex;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {0} out of range")]
    InvalidVertex(Vertex),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{got} failed vertices given, at most {max} supported")]
    TooManyFailures { got: usize, max: usize },
    #[error("pair ({0}, {1}) is not covered by any tree")]
    NotCovered(Vertex, Vertex),
    #[error("memory budget exceeded: {0}")]
    Budget(String),
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
