//! Error type shared by every module in the crate.

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The edge list holds no interactions, so no time span exists.
    #[error("edge list is empty; time span is undefined")]
    EmptySpan,

    /// More fixed-count slots were requested than the span has days.
    #[error("cannot cut a {days}-day span into {requested} slots")]
    TooManySlots { requested: u32, days: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// The requested root has no interaction inside the snapshot's slot.
    #[error("root node {0} is not active in the snapshot")]
    RootInactive(NodeId),

    #[error("snapshot contains no edges")]
    EmptyGraph,

    /// The query node is inactive in the full span or in every slot.
    #[error("query node {0} is not active in any snapshot")]
    QueryIsolated(NodeId),

    #[error("voting threshold p must be >= 1 (got {0})")]
    InvalidThreshold(u32),

    /// Queries that have no entry in the ground truth.
    #[error("queries missing from ground truth: {}", join_ids(.0))]
    MissingTruth(Vec<NodeId>),

    #[error("recall curves are not comparable: {0}")]
    IncomparableCurves(String),

    #[error("{path}: no valid data rows")]
    EmptyInput { path: String },

    #[error("{path}:{line}: {message}")]
    MalformedRow {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{path}: missing required column '{column}'")]
    MissingColumn { path: String, column: String },

    /// Ground-truth labels that never occur in the edge data.
    #[error("unknown actors in ground truth: {}", .0.join(", "))]
    UnknownActor(Vec<String>),

    #[error("degenerate synthetic configuration: {0}")]
    DegenerateConfig(String),

    #[error("duplicate query node {0}")]
    DuplicateQuery(NodeId),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn join_ids(ids: &[NodeId]) -> String {
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
