use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A configured size cap would be exceeded. Never evidence about the object itself.
    #[error("{what}: cap of {limit} exceeded (needed {needed})")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        needed: usize,
    },

    /// Coset enumeration hit its limit. This is inconclusive, not a proof of infinite index.
    #[error("coset enumeration exceeded the limit of {limit} cosets")]
    CosetLimit { limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("graph is not connected")]
    NotConnected,

    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// An operation needed data beyond the edge of a truncated (ball) construction.
    #[error("truncation: {0}")]
    Truncation(String),

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Two independent computations that must agree did not.
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),

    #[error("integer overflow in fixed-width arithmetic")]
    Overflow,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Resource-type failures map to "inconclusive" rather than to a failed check.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. } | Error::CosetLimit { .. } | Error::Truncation(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_cap(what: &'static str, needed: usize, limit: usize) -> Result<()> {
    if needed > limit {
        Err(Error::CapExceeded {
            what,
            limit,
            needed,
        })
    } else {
        Ok(())
    }
}
