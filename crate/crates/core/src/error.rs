use thiserror::Error;

use crate::graph::Violation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("invalid graph: {}", display_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("directed cycle through {0:?}")]
    Cycle(Vec<String>),

    #[error("vertex sets overlap on {0:?}")]
    Overlap(Vec<String>),

    #[error("vertex `{0}` is not fixable")]
    NotFixable(String),

    #[error("vertex `{0}` is a context (fixed) vertex")]
    ContextVertex(String),

    #[error("graph has context vertices; this operation needs an unconditioned mDAG")]
    HasContext,

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("graph contains circle marks")]
    CircleMarks,

    #[error("graph is not ancestral")]
    NotAncestral,

    #[error("graphs are over different vertex sets")]
    MismatchedVertices,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("conditional probability of `{0}` given its Markov blanket is zero")]
    ZeroConditional(String),

    #[error("fixed distribution has total mass {0}, expected 1")]
    MassCheck(f64),

    #[error("variable `{0}` is not binary")]
    NotBinary(String),

    #[error("conditioning context has zero probability")]
    ZeroMassContext,

    #[error("invalid distribution: {0}")]
    Distribution(String),
}

fn display_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
