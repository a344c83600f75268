use thiserror::Error;

/// Errors produced by the detection library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error(
        "exhaustive search over C({p},{k}) = {subsets} subsets exceeds the budget of {budget}; \
         use the MDP or SDP statistic instead"
    )]
    BudgetExceeded {
        p: usize,
        k: usize,
        subsets: u128,
        budget: u128,
    },

    #[error(
        "solver did not converge after {iterations} iterations; certified interval [{lower}, {upper}]"
    )]
    NotConverged {
        lower: f64,
        upper: f64,
        iterations: usize,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
