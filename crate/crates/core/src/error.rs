//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has a directed cycle")]
    CycleDetected,
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(usize, usize),
    #[error("vertex count {0} exceeds closure cap {1}")]
    ClosureCapExceeded(usize, usize),
    #[error("value vector has length {got}, expected {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("operation requires exact rational values, got float mode")]
    FloatModeForbidden,
    #[error("graph is not bipartite-oriented (no left/right split recorded)")]
    NotBipartite,
    #[error("edges do not form a matching: vertex {0} appears twice")]
    NotAMatching(usize),
    #[error("not a submatching of the parent matching")]
    NotASubmatching,
    #[error("invalid weight witness: {0}")]
    InvalidWitness(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dynamic range exceeded: {distinct} distinct values do not fit in [{bound}]")]
    RangeExceeded { distinct: usize, bound: usize },
    #[error("query set touches {0} matching edges, above the enumeration cap {1}")]
    EnumerationTooLarge(usize, usize),
    #[error("strategy exceeded the query budget {0}")]
    BudgetExceeded(usize),
    #[error("dense core is empty after pruning")]
    EmptyCore,
    #[error("dense-core balancing failed to reach the degree target after {0} retries")]
    CoreBalancingFailed(usize),
    #[error("value {0} outside the box [-{1}, {1}]")]
    OutOfBox(f64, f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
