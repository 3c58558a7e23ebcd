use thiserror::Error;

use crate::model::ElementId;

/// Errors raised while loading or validating a scenario, or when a query's
/// precondition does not hold.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed scenario document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("element ids must be contiguous from 0: position {position} holds id {id}")]
    NonContiguousId { position: usize, id: usize },

    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),

    #[error("duplicate generator name {0:?}")]
    DuplicateGenerator(String),

    #[error("generator {generator:?} maps {source_id} more than once")]
    GeneratorNotFunction { generator: String, source_id: usize },

    #[error("{context} references unknown element id {id}")]
    DanglingId { context: String, id: usize },

    #[error("strict pairs {x}>{y} and {y}>{x} contradict each other")]
    ContradictoryStrict { x: String, y: String },

    #[error(
        "scenario declared commutative but {first:?}∘{second:?} ≠ {second:?}∘{first:?} at {element}"
    )]
    NotCommutative {
        first: String,
        second: String,
        element: String,
    },

    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),

    #[error("pair ({first}, {second}) is already related: {relation}")]
    PairRelated {
        first: ElementId,
        second: ElementId,
        relation: String,
    },

    #[error("strong coherency requested for a scenario that is not declared commutative")]
    StrongNotAdmissible,

    #[error("window of {n} elements exceeds the enumeration cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("scenario admits no coherent weak-order extension on the window")]
    Unsatisfiable,

    #[error("invalid generator spec {spec:?}: {reason}")]
    BadSpec { spec: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
