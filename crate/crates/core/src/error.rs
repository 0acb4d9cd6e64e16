use thiserror::Error;

/// Errors produced by the solvers, evaluators and oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    #[error("singular parameters: {0}")]
    SingularParameters(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence after {iterations} iterations (last mismatch {mismatch:.3e})")]
    Convergence { iterations: usize, mismatch: f64 },

    #[error("integration diverged at eta = {eta}")]
    Divergence { eta: f64 },

    #[error("eta = {eta} lies beyond the tabulated profile (eta_max = {eta_max})")]
    Extrapolation { eta: f64, eta_max: f64 },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(key: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
