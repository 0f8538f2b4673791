use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("edge {index} has negative timestamp {t}")]
    NegativeTimestamp { index: usize, t: i64 },
    #[error("edge {index} references node {node} but the graph has {node_count} nodes")]
    NodeOutOfRange {
        index: usize,
        node: u32,
        node_count: usize,
    },
    #[error("invalid split ratios (train={train}, val={val})")]
    InvalidSplitRatios { train: f64, val: f64 },
    #[error("split of {edges} edges leaves the training range empty")]
    EmptyTrain { edges: usize },
    #[error("split leaves the test range empty")]
    EmptyTest,
    #[error("batch size must be at least 1")]
    ZeroBatchSize,
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("sub-chunk size must be at least 1")]
    ZeroPieceSize,
    #[error("negatives_per_positive must be at least 1")]
    ZeroNegatives,
    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("label sequence is empty")]
    EmptyLabels,
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("assignments cover different edge ranges")]
    RangeMismatch,
    #[error("node universe needs at least 2 nodes, has {nodes}")]
    UniverseTooSmall { nodes: usize },
    #[error(
        "chunk {chunk}: requested {requested} negative pairs but only {available} candidates exist"
    )]
    UniverseExhausted {
        chunk: i64,
        requested: usize,
        available: usize,
    },
    #[error("metric undefined: {0}")]
    MetricUndefined(&'static str),
    #[error("non-finite score at instance {index}")]
    NonFiniteScore { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("forecaster contract violated: {0}")]
    ContractViolation(String),
    #[error("score rows diverge from instances at row {row}: {reason}")]
    ReplayMismatch { row: usize, reason: String },
}
