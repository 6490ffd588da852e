use crate::netmodel::NodeId;

/// Errors surfaced by network construction, file I/O, and solver plumbing.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("a network needs at least {min} nodes, got {got}")]
    TooFewNodes { min: usize, got: usize },

    #[error("unknown node {0:?}")]
    UnknownNode(NodeId),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("network file is malformed: {0}")]
    MalformedNetwork(String),

    #[error("link ({a}, {b}) appears more than once")]
    DuplicateLink { a: usize, b: usize },

    #[error("enumerating all subsets of {nodes} nodes; pass force to allow more than {limit}")]
    SubsetBlowup { nodes: usize, limit: usize },

    #[error("rerouted rate {r} exceeds available rate {available} on the target pair")]
    RateExceeded { r: f64, available: f64 },

    #[error("solution has {got} entries, linear program has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("solver failed: {0}")]
    SolverFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
