use thiserror::Error;

use crate::words::Symbol;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity must be positive")]
    ZeroArity,

    #[error("symbol `{0}` is reserved for padding")]
    ReservedPad(Symbol),

    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(Symbol),

    #[error("symbol `{symbol}` is not in the {context} alphabet")]
    NotInAlphabet { symbol: Symbol, context: String },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("character ({0}) is outside the table domain")]
    OutsideDomain(String),

    #[error("invalid machine: {0}")]
    InvalidMachine(String),

    #[error("machine has a single state, no complement exists")]
    SingleState,

    #[error("{0} is required")]
    WrongClass(&'static str),

    #[error("invalid ordinal removal sequence: {0}")]
    InvalidRemoval(String),

    #[error("{stage}: size {size} exceeds cap {cap}")]
    CapExceeded {
        stage: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("invalid term: {0}")]
    InvalidTerm(String),

    #[error("node `{0}` has no conjugate in a length-preserving term")]
    NoConjugate(&'static str),

    #[error("not functional: {0}")]
    NotFunctional(String),

    #[error("format error at {path}: {message}")]
    Format { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn format(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
