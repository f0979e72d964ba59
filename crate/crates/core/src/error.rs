use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rational {text:?}: {reason}")]
    InvalidRational { text: String, reason: String },

    #[error("alternative set must be non-empty")]
    EmptyAlternatives,

    #[error("duplicate alternative label {0:?}")]
    DuplicateAlternative(String),

    #[error("unknown alternative {0:?}")]
    UnknownAlternative(String),

    #[error("alternative index {index} out of range for {len} alternatives")]
    AlternativeOutOfRange { index: usize, len: usize },

    #[error("table has {found} entries, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("valuation flagged non-negative has negative value {value} at {alternative}")]
    NegativeValue { alternative: String, value: Box<Rational> },

    #[error("player {player}: valuation #{index} does not attain its maximum at {maximum}")]
    NotAMaximum {
        player: usize,
        index: usize,
        maximum: String,
    },

    #[error("player {0} has an empty valuation grid")]
    EmptyGrid(usize),

    #[error("instance has {players} players but {found} {what}")]
    PlayerCountMismatch {
        players: usize,
        found: usize,
        what: &'static str,
    },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("floor {floor} exceeds the minimum {min} of the announcement over the truthful subset")]
    FloorTooHigh { floor: Box<Rational>, min: Box<Rational> },

    #[error("off-maxima value {0} lies outside [0, 9]")]
    OffRuleOutOfRange(Box<Rational>),

    #[error("table strategy has no entry for the given valuation")]
    MissingTableEntry,

    #[error("player {player}: no Z-valuation in the grid ({needed})")]
    MissingZValuation { player: usize, needed: String },

    #[error("equilibrium welfare is zero, ratio undefined")]
    UndefinedRatio,

    #[error("profile is not an ex-post equilibrium on this instance")]
    NotAnEquilibrium,

    #[error("{count} allocations exceed the cap of {cap}")]
    TooManyAllocations { count: u128, cap: usize },

    #[error("missing bundle entry {0:?}")]
    MissingBundle(String),

    #[error("bundle family is not a quasi-field: {0}")]
    NotQuasiField(String),

    #[error("invalid segment decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("invalid interval map: {0}")]
    InvalidIntervalMap(String),

    #[error("invalid sampled function: {0}")]
    InvalidSampledFunction(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
