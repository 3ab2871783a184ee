use thiserror::Error;

use crate::ordinal::Ordinal;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{0} is not a limit ordinal")]
    NotLimit(Ordinal),

    #[error("ladder on {delta} has no element at position {index}")]
    LadderExhausted { delta: Ordinal, index: usize },

    #[error("invalid ladder: {0}")]
    InvalidLadder(String),

    #[error("valuation of zero is undefined")]
    ZeroValuation,

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} is not a generator cut")]
    NotACut(String),

    #[error("support index {0} missing from the coordinate basis")]
    NotInBasis(Ordinal),

    #[error("{0} is not a member of the ring (negative valuation)")]
    NotAMember(String),

    #[error("could not find {wanted} pairwise incongruent units at level {level}")]
    GapTooSmall { level: Ordinal, wanted: usize },

    #[error("the two strings are equal")]
    EqualStrings,

    #[error("strings have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
