use thiserror::Error;

use crate::mdfg::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("unknown edge index {0}")]
    UnknownEdge(usize),

    #[error("path is not a connected walk: edge {index} does not start where the previous edge ended")]
    DisconnectedPath { index: usize },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0}: only 2-D graphs are supported here")]
    UnsupportedDimension(usize),

    #[error("zero-delay cycle through node `{0}`")]
    ZeroDelayCycle(String),

    #[error("invalid graph: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),

    #[error("iteration space has {cells} cells, limit is {limit}")]
    CellLimit { cells: u128, limit: u128 },

    #[error("iteration space has {instances} node instances, limit is {limit}")]
    InstanceLimit { instances: u128, limit: u128 },

    #[error("invalid bounds in dimension {dim}: lower {lower} > upper {upper}")]
    InvalidBounds { dim: usize, lower: i64, upper: i64 },

    #[error("no strictly positive schedule vector within radius {radius}")]
    NoSchedule { radius: i64 },

    #[error("no legal retiming vector orthogonal to schedule {0:?}")]
    NoRetimingVector(Vec<i64>),

    #[error("not a multi-chain graph: node `{0}` has more than one zero-delay predecessor or successor")]
    NotMultiChain(String),

    #[error("incremental retiming did not converge after {0} rounds")]
    NotConverged(usize),

    #[error("retiming exceeds spatial constraint: node `{node}` has |r[{dim}]| = {magnitude} >= {size}")]
    SpatialInfeasible {
        node: String,
        dim: usize,
        magnitude: i64,
        size: i64,
    },

    #[error("node `{0}` has no statement template")]
    MissingStatement(String),

    #[error("retiming is illegal under schedule {schedule:?}: {reason}")]
    IllegalRetiming { schedule: Vec<i64>, reason: String },

    #[error("no schedule basis: retiming of node `{0}` is not a multiple of the base vector")]
    NoScheduleBasis(String),

    #[error("malformed program: {0}")]
    MalformedProgram(String),
}
