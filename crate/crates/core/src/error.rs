use thiserror::Error;

use crate::model::InstrumentKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("position {ticks} is outside 0..={max} ticks")]
    OutOfRange { ticks: u64, max: u32 },
    #[error("{0} has no vernier scale")]
    NotVernier(InstrumentKind),
    #[error("reading component {component} = {value} is out of bounds (limit {limit})")]
    ComponentOutOfBounds {
        component: &'static str,
        value: u32,
        limit: u32,
    },
    #[error("expected a {expected} reading, got {actual}")]
    KindMismatch {
        expected: InstrumentKind,
        actual: InstrumentKind,
    },
    #[error("invalid instrument spec: {0}")]
    InvalidSpec(String),
}

/// Text that is not a plain non-negative decimal number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseAnswerError {
    #[error("empty answer")]
    Empty,
    #[error("unexpected character {found:?} at byte {at}; use digits and a decimal point")]
    Unexpected { found: char, at: usize },
    #[error("a decimal point must have digits on both sides")]
    DanglingPoint,
    #[error("number has too many significant digits")]
    TooLong,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradeError {
    #[error("malformed answer: {0}")]
    Malformed(#[from] ParseAnswerError),
    #[error("exercise {0} was already answered")]
    AlreadyAnswered(String),
    #[error(transparent)]
    Instrument(#[from] Error),
}
