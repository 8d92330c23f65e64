use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop at node {node}")]
    SelfLoop { node: u32 },

    #[error("node id {node} out of range for {count} nodes")]
    NodeOutOfRange { node: u64, count: usize },

    #[error("node count {count} exceeds the 32-bit id space")]
    TooManyNodes { count: usize },

    #[error("non-positive weight {weight} on {what}")]
    NonPositiveWeight { what: String, weight: i64 },

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("missing reverse entry for edge ({from}, {to}) or mismatched weight")]
    Asymmetric { from: u32, to: u32 },

    #[error("duplicate neighbor {neighbor} in adjacency of node {node}")]
    DuplicateNeighbor { node: u32, neighbor: u32 },

    #[error("probability {value} outside [0, 1]")]
    InvalidProbability { value: f64 },

    #[error("expected edge count {expected:.0} exceeds budget {budget}")]
    EdgeBudgetExceeded { expected: f64, budget: u64 },

    #[error("selection target {target} outside [1, {len}]")]
    TargetOutOfRange { target: usize, len: usize },

    #[error("score vector length {scores} does not match edge count {edges}")]
    ScoreLengthMismatch { scores: usize, edges: usize },

    #[error("graph has no edges")]
    EdgelessGraph,

    #[error("coarse node id {id} out of range for {count} coarse nodes")]
    MappingOutOfRange { id: u32, count: usize },

    #[error("{file}: expected {expected} lines, found {found}")]
    LengthMismatch {
        file: String,
        expected: usize,
        found: usize,
    },

    #[error("cut table is empty")]
    EmptyTable,

    #[error("cut table is missing an entry for algorithm {algorithm:?} on instance {instance:?}")]
    IncompleteTable { algorithm: String, instance: String },

    #[error(
        "cut table has a duplicate entry for algorithm {algorithm:?} on instance {instance:?}"
    )]
    DuplicateEntry { algorithm: String, instance: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
