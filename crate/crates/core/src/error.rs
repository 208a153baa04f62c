use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("size cap exceeded: {what} needs {needed} entries, cap is {cap}")]
    Size {
        what: String,
        needed: String,
        cap: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

/// `base^exp` if it fits in `usize`.
pub(crate) fn checked_power(base: usize, exp: usize) -> Option<usize> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}

/// Fails with [`Error::Size`] unless `needed` is known and within `cap`.
pub(crate) fn ensure_cap(what: &str, needed: Option<usize>, cap: usize) -> Result<usize> {
    match needed {
        Some(n) if n <= cap => Ok(n),
        Some(n) => Err(Error::Size {
            what: what.to_string(),
            needed: n.to_string(),
            cap,
        }),
        None => Err(Error::Size {
            what: what.to_string(),
            needed: "more than usize::MAX".to_string(),
            cap,
        }),
    }
}
