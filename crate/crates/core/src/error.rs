use thiserror::Error;

use crate::portrait::MAX_DEPTH;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("insufficient precision: need {needed} bits, have {available}")]
    Precision { needed: u32, available: u32 },

    #[error("{0} is not a 2-adic unit")]
    NotUnit(String),

    #[error("cannot halve odd element {0}")]
    OddHalve(String),

    #[error("portrait depths differ ({0} vs {1})")]
    DepthMismatch(u32, u32),

    #[error("depth {0} exceeds the supported maximum of {MAX_DEPTH}")]
    DepthTooLarge(u32),

    #[error("level {level} out of range for depth {depth}")]
    Level { level: u32, depth: u32 },

    #[error("indeterminate at current precision: {0}")]
    Indeterminate(String),

    #[error("exponent {0} must be an exact integer here")]
    InexactExponent(String),

    #[error("generator index {index} outside 1..={r}")]
    GeneratorIndex { index: u32, r: u32 },

    #[error("period length r = {0} outside the supported range 2..=8")]
    Period(u32),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("invalid portrait encoding: {0}")]
    Codec(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
