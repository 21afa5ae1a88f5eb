use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base {0} is outside the supported range 2..=10")]
    InvalidBase(u32),

    #[error("digit {digit:?} is not valid in base {base}")]
    InvalidDigit { digit: char, base: u8 },

    #[error("value {0} lies outside [0, 1)")]
    SpecOutOfRange(String),

    #[error("malformed real spec {spec:?}: {reason}")]
    BadRealSpec { spec: String, reason: String },

    #[error("digit stream cannot supply position {needed}")]
    InsufficientDigits { needed: usize },

    #[error("exact rational value required, but {0} has none")]
    ExactValueRequired(String),

    #[error("invalid precision: {0}")]
    InvalidPrecision(String),

    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("missing transition for state {state}, symbol {symbol}")]
    MissingTransition { state: usize, symbol: u8 },

    #[error("line {line}: duplicate transition for state {state}, symbol {symbol}")]
    DuplicateTransition { line: usize, state: usize, symbol: u8 },

    #[error("line {line}: state {state} out of range (machine has {states} states)")]
    StateOutOfRange { line: usize, state: usize, states: usize },

    #[error("base mismatch: expected {expected}, found {found}")]
    BaseMismatch { expected: u8, found: u8 },

    #[error("pattern must be nonempty")]
    EmptyPattern,

    #[error("insufficient training data: need at least {needed} digits, have {available}")]
    InsufficientTraining { needed: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("no usable row in the estimation window")]
    AllRowsFlagged,

    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            msg: err.to_string(),
        }
    }
}
