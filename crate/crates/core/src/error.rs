use thiserror::Error;

use crate::validate::Diagnostic;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid program: {}", join(.0))]
    InvalidProgram(Vec<Diagnostic>),
    #[error("resource limit exceeded: more than {max} {limit}")]
    LimitExceeded { limit: &'static str, max: usize },
    #[error("thread {0} has no instruction left")]
    ThreadExhausted(usize),
    #[error("transition {0} is not enabled")]
    NotEnabled(String),
    #[error("unknown register or location {0}")]
    UnknownName(String),
    #[error("relation: {0}")]
    Relation(#[from] RelationError),
    #[error("event {0} cannot head a release sequence")]
    NotReleaseHead(usize),
    #[error("malformed candidate execution: {0}")]
    Candidate(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("universes differ ({0} vs {1})")]
    UniverseMismatch(usize, usize),
    #[error("relation is cyclic on the requested elements")]
    Cyclic,
    #[error("universe of {0} elements exceeds the bitset capacity of 64")]
    TooLarge(usize),
    #[error("element {0} is outside the universe")]
    OutOfRange(usize),
}

fn join(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
