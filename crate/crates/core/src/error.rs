use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit exceeded: {what} (cap {cap})")]
    ResourceLimit { what: String, cap: u64 },

    #[error("precision violation: {0}")]
    PrecisionViolation(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn limit(what: impl Into<String>, cap: u64) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            cap,
        }
    }

    /// True for user-input problems (bad parameters, caps), false for
    /// failures of the computation itself.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::ResourceLimit { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
