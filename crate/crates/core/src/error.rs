use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid weight {weight} at ({row}, {col})")]
    InvalidWeight { row: usize, col: usize, weight: f64 },

    #[error("malformed CSR structure: {0}")]
    MalformedCsr(String),

    #[error("adjacency is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("graph has zero total weight")]
    ZeroWeight,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node {node} has zero degree; the normalized operator is singular")]
    SingularDegree { node: usize },

    #[error(
        "eigensolver did not converge: {converged} of {requested} pairs after {matvecs} products \
         (worst residual {worst_residual:e})"
    )]
    NonConvergence {
        requested: usize,
        converged: usize,
        matvecs: usize,
        worst_residual: f64,
    },

    #[error("block {0} is empty")]
    EmptyBlock(usize),

    #[error("labels do not describe a block model: node {node} differs from its block")]
    NotABlockModel { node: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("lambda {lambda} sits on the pole mu_{index}")]
    Pole { lambda: f64, index: usize },

    #[error("bisection interval ({lo}, {hi}) does not bracket a root")]
    NoBracket { lo: f64, hi: f64 },

    #[error("dense materialization of {n} nodes exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("cannot form {k} clusters from {points} points")]
    TooManyClusters { k: usize, points: usize },

    #[error("column {column} has a zero entry at node {node}")]
    ZeroEntry { column: usize, node: usize },

    #[error("block {block} has entries of both signs")]
    MixedSigns { block: usize },

    #[error("empty input")]
    EmptyInput,
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
