use thiserror::Error;

use crate::admg::VertexSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),

    #[error("duplicate {kind} edge between `{from}` and `{to}`")]
    DuplicateEdge {
        kind: &'static str,
        from: String,
        to: String,
    },

    #[error("directed cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("selection vertex `{selection}` must be a sink but has children {children}")]
    SelectionHasChildren {
        selection: String,
        children: VertexSet,
    },

    #[error("graph has no selection vertex")]
    MissingSelection,

    #[error("the selection vertex `{0}` cannot be used in a treatment or outcome set")]
    SelectionInQuery(String),

    #[error("vertex sets must be disjoint but overlap on {0}")]
    Overlap(VertexSet),

    #[error("the outcome set must not be empty")]
    EmptyOutcome,

    #[error("{subset} is not ancestral in the subgraph induced by {scope}")]
    NotAncestral { subset: VertexSet, scope: VertexSet },

    #[error("s-components are only defined for subsets of the non-ancestors of S; {0} is not one")]
    NotInNonAncestors(VertexSet),

    #[error("{0} is not a single {1}")]
    NotSingleComponent(VertexSet, &'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("graph has {actual} vertices, brute force is limited to {cap}")]
    SizeCap { cap: usize, actual: usize },

    #[error("zero denominator at {assignment}; the table violates positivity")]
    ZeroDenominator { assignment: String },

    #[error("variable `{0}` is free in the estimand but not assigned")]
    UnboundVariable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "state space of {states} exceeds the cap of {cap}; use fewer variables or smaller domains"
    )]
    StateSpace { states: u128, cap: u128 },

    #[error("the selection event has probability zero")]
    ZeroSelection,

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
