use thiserror::Error;

/// Errors raised by the library. Outcomes that are part of a normal answer
/// (an infeasible system, a failed validation) are returned as values, not
/// errors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("events belong to sample spaces of different sizes ({left} vs {right})")]
    SpaceMismatch { left: usize, right: usize },

    #[error("sample space has {size} histories; the hard limit is {limit}")]
    SpaceTooLarge { size: usize, limit: usize },

    #[error("exhaustive enumeration over {size} histories exceeds the default cap of {cap}; enable large enumeration to override")]
    EnumerationCap { size: usize, cap: usize },

    #[error("invalid sample space: {0}")]
    InvalidSpace(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("events passed to a disjoint-argument operation overlap: {0}")]
    NotDisjoint(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("the empty event has no dual co-event")]
    EmptyDual,

    #[error("operation requires a multiplicative co-event")]
    NotMultiplicative,

    #[error("operation requires a decoherence-form theory")]
    NotDecoherenceForm,

    #[error("invalid co-event: {0}")]
    InvalidCoEvent(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported model: {0}")]
    Unsupported(String),

    #[error("no heads-count threshold exists: the lowest tail already reaches epsilon")]
    NoThreshold,

    #[error("feasibility system is empty: {0}")]
    EmptySystem(String),

    #[error("feasibility system is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
