use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("class {class} out of range for {num_classes} classes")]
    ClassOutOfRange { class: usize, num_classes: usize },

    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{what} did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("non-finite loss at epoch {epoch}")]
    NanLoss { epoch: usize },

    #[error("unknown strategy `{name}`; available: {available}")]
    UnknownStrategy { name: String, available: String },

    #[error("class `{0}` has no node available in the pool")]
    ClassAbsent(String),

    #[error("candidate pool exhausted: needed {needed}, {available} left")]
    PoolExhausted { needed: usize, available: usize },

    #[error("missing label for node {0}")]
    MissingLabel(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        message: message.into(),
    }
}
