use crate::levels::LevelError;
use crate::linalg::DimensionError;
use crate::scalar::ScalarError;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Level(#[from] LevelError),
    /// The specification itself is malformed.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{what} of {requested} exceeds the configured maximum {max}")]
    TooLarge {
        what: &'static str,
        requested: u128,
        max: u128,
    },
    #[error("value {value} at index {index} is out of range: {reason}")]
    OutOfRange {
        index: u64,
        value: String,
        reason: String,
    },
    #[error("need at least {needed} coefficients, have {have}")]
    InsufficientTerms { needed: usize, have: usize },
    /// A mathematical hypothesis does not hold for the input.
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("search budget of {cap} exhausted")]
    SearchExhausted { cap: u64 },
    /// A block decomposition disagrees with the sequence at block `n`, offset `j`.
    #[error("block decomposition fails at n = {n}, j = {j}: {detail}")]
    BlockMismatch { n: u64, j: u64, detail: String },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    /// True when the failure is a property of the mathematics rather
    /// than of the input format.
    pub fn is_math_failure(&self) -> bool {
        matches!(
            self,
            Error::Scalar(ScalarError::DivisionByZero)
                | Error::OutOfRange { .. }
                | Error::Hypothesis(_)
                | Error::SearchExhausted { .. }
                | Error::BlockMismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
