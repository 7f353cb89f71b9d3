//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, MetrologyError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetrologyError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// The symmetry function's derivative is zero, infinite or NaN somewhere
    /// on the hypothesis range; the range has to be shrunk.
    #[error("symmetry derivative is not finite and nonzero at {at}")]
    NonFiniteDerivative { at: f64 },

    /// The data carry no support anywhere under the prior.
    #[error("zero evidence: likelihood vanishes on the whole prior support")]
    ZeroEvidence,

    #[error("degenerate symmetry derivative {value:e} at the estimate")]
    DegenerateDerivative { value: f64 },

    #[error("outcome truncation failed: coverage {coverage:.6} < {threshold} at max outcome {max_outcome}")]
    TruncationFailure {
        coverage: f64,
        threshold: f64,
        max_outcome: u64,
    },

    #[error("likelihood is zero everywhere")]
    AllZero,

    #[error("likelihood has {len} values but the grid has {points} points")]
    LengthMismatch { len: usize, points: usize },

    /// Dark-count subtraction drove a mean count to zero or below.
    #[error("non-positive corrected mean count {mean}")]
    NonPositiveMean { mean: f64 },

    #[error("mean of estimates is zero")]
    ZeroMean,

    #[error("strategy {strategy} has {m} usable repeats, need at least 2")]
    InsufficientRepeats { strategy: String, m: usize },

    #[error("invalid value for `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("malformed shot log at row {row}: {message}")]
    MalformedLog { row: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl MetrologyError {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        MetrologyError::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for MetrologyError {
    fn from(err: std::io::Error) -> Self {
        MetrologyError::Io(err.to_string())
    }
}
