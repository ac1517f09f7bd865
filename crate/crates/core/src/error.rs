use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} out of range for hypergraph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("hyperedge {edge}: {reason}")]
    InvalidHyperedge { edge: usize, reason: String },

    #[error("invalid cut cost: {0}")]
    InvalidCost(String),

    #[error("hyperedge {edge}: cut value undefined for local subset {subset:?}")]
    UndefinedCost { edge: usize, subset: Vec<usize> },

    #[error("subset is not contained in the hyperedge")]
    SubsetNotInEdge,

    #[error("degenerate cut: {0}")]
    DegenerateCut(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("cost function is not submodular")]
    NotSubmodular,

    #[error("cost function is insufficiently specified: {0}")]
    Underspecified(String),

    #[error("arity {arity} exceeds the supported limit of {limit}")]
    ArityTooLarge { arity: usize, limit: usize },

    #[error("projection/arity mismatch at hyperedge {edge}: expected {expected}, found {found}")]
    ArityMismatch { edge: usize, expected: usize, found: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("linear program: {0}")]
    Lp(String),

    #[error("graph has negative weight {weight} on pair ({u}, {v})")]
    NegativeWeight { u: usize, v: usize, weight: f64 },

    #[error("graph has no vertex with positive degree")]
    EmptyGraph,

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("audit refused: {0}")]
    AuditRefused(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
