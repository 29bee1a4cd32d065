use thiserror::Error;

/// Errors produced by the library.
///
/// Every variant except [`Error::GuardExceeded`] is a domain error: the
/// caller handed in a value outside the operation's contract.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("prefix must be non-empty")]
    EmptyPrefix,
    #[error("digits must be positive and strictly increasing (violated at index {index})")]
    NotStrictlyIncreasing { index: usize },
    #[error("interval [{lo}, {hi}] has empty interior")]
    DegenerateInterval { lo: String, hi: String },
    #[error("rule `{0}` has no analytic certificate")]
    Uncertified(String),
    #[error("guard exceeded: {what} = {value} > {limit}")]
    GuardExceeded {
        what: &'static str,
        value: String,
        limit: String,
    },
    #[error("cannot parse `{0}` as an exact rational p/q")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for every error that is not a guard failure.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::GuardExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
