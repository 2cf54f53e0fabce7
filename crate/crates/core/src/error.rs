use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),

    #[error("vertex count mismatch: {0} vs {1}")]
    VertexCountMismatch(usize, usize),

    #[error("invalid clustering: {0}")]
    InvalidClustering(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("oracle limited to {limit} vertices, got {n}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("clause {clause} is not satisfied by the assignment")]
    UnsatisfiedClause { clause: usize },

    #[error("assignment is unbalanced in part {part}: {trues} true vs {falses} false")]
    UnbalancedPart { part: usize, trues: usize, falses: usize },

    #[error("assignment covers {got} variables, formula has {expected}")]
    AssignmentLength { expected: usize, got: usize },

    #[error("graph too large to materialize: {0}")]
    TooLarge(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
