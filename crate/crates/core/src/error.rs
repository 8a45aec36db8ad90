use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the graph calculus, the classifier and the verifier.
///
/// Vertex labels carried by errors are 0-based, like the rest of the library
/// API. Only the text formats shift to 1-based labels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid sign matrix: {0}")]
    InvalidEpsilon(String),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("relative mutation needs two distinct vertices, got {0} twice")]
    EqualVertices(usize),

    #[error("{0}-{1} is not an isolated edge")]
    NotIsolatedEdge(usize, usize),

    #[error("vertex {0} is not isolated")]
    NotIsolated(usize),

    #[error("no isolated vertex distinct from {0} and {1}; relative mutation is not category-preserving here")]
    MissingWitness(usize, usize),

    #[error("graph has no isolated vertex")]
    NoIsolatedVertex,

    #[error("J(G) is empty")]
    JZero,

    #[error("point-scheme analysis needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("graph on {n} vertices exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("step {index} ({step}) cannot be applied: {reason}")]
    InapplicableStep {
        index: usize,
        step: String,
        reason: String,
    },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph passes check `{0}`; nothing to minimize")]
    NotFailing(String),

    #[error("no checks selected")]
    EmptySuite,
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
