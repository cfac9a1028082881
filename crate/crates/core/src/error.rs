use thiserror::Error;

/// Errors produced while reading, validating or solving an instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("job {job} is infeasible: total processing {lambda} needs deadline >= {needed}, got {deadline}")]
    Infeasible {
        job: usize,
        lambda: u64,
        deadline: u32,
        needed: u64,
    },

    #[error("{kind} index {index} out of range 1..={max}")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        max: usize,
    },

    #[error("cannot scale {0:?} by ten without loss (at most one fractional digit allowed)")]
    LossyScaling(String),

    #[error("candidate space of {candidates} exceeds the guard of {limit}; pass force to enumerate anyway")]
    CandidateGuard { candidates: String, limit: u64 },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("invalid generator spec: {0}")]
    GenSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
