use thiserror::Error;

/// Errors raised by the forecasting core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("observation {index} (1-based) exceeds its bound: value {value}, bound {bound}")]
    AboveBound { index: usize, value: f64, bound: f64 },

    #[error("series too short: need at least {needed} observations, have {have}")]
    SeriesTooShort { needed: usize, have: usize },

    #[error("all probability mass is censored (P(uncensored) = {0:e})")]
    AllMassCensored(f64),

    #[error("initial state not identifiable: {0}")]
    Singular(String),

    #[error("no candidate model could be fitted")]
    NoCandidateFitted,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
