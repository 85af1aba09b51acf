use thiserror::Error;

/// Errors raised by the quantile, classification and reducer routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid piecewise function: {0}")]
    InvalidFunction(String),

    #[error("invalid payoff specification: {0}")]
    InvalidSpec(String),

    #[error("integral diverges: {0}")]
    DivergentIntegral(String),

    #[error("unsupported tail kind: {0}")]
    UnsupportedKind(String),

    #[error("level {p} lies outside the validity interval {interval}")]
    OutOfValidRange { p: f64, interval: String },

    #[error("continuity mismatch: {0}")]
    ContinuityMismatch(String),

    #[error("no comonotonic difference construction for {0}")]
    MixedKinds(String),

    #[error("trivial case: identical location and scale parameters")]
    TrivialCase,

    #[error("quantile difference is constant; the equivalence is vacuous")]
    DegenerateDifference,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
