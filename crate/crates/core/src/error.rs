use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input arity mismatch: expected {expected} bits, got {got}")]
    InputArity { expected: usize, got: usize },

    #[error("bit index {index} out of range 1..={len}")]
    BitIndex { index: usize, len: usize },

    #[error("invalid bit string {0:?}")]
    BitString(String),

    #[error("resource limit: {what} is {size}, cap is {cap}")]
    ResourceLimit {
        what: &'static str,
        size: u64,
        cap: u64,
    },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("dimacs parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("query {id}: {source}")]
    Query {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("external counter: {0}")]
    External(String),

    #[error("counter cross-check failed: internal={internal}, external={external}")]
    CrossCheck { internal: u64, external: u64 },
}

impl Error {
    pub(crate) fn construction(msg: impl Into<String>) -> Self {
        Error::Construction(msg.into())
    }

    /// True if this error (or the error it wraps) is a resource-limit error.
    pub fn is_resource_limit(&self) -> bool {
        match self {
            Error::ResourceLimit { .. } => true,
            Error::Query { source, .. } => source.is_resource_limit(),
            _ => false,
        }
    }
}
