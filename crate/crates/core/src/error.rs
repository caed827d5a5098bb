use thiserror::Error;

/// Errors raised by the numerical routines and the command line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("linear-domain product overflows after {count} factors; use the log-domain variant")]
    Overflow { count: u64 },

    #[error("argument z/step = {ratio} is below the shift threshold {threshold}; shift upward first")]
    ShiftRequired { ratio: f64, threshold: f64 },

    #[error("quadrature did not converge after {levels} levels (best estimate {estimate}, error estimate {error_estimate})")]
    NonConvergence {
        levels: usize,
        estimate: f64,
        error_estimate: f64,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
