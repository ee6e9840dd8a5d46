use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("integration aborted at t = {t:.3} s: {reason}")]
    IntegrationAbort { t: f64, reason: String },

    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("batch failed: all {runs} runs aborted")]
    BatchFailed { runs: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl SimError {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        SimError::Domain {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        SimError::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Io(e.to_string())
    }
}

impl From<csv::Error> for SimError {
    fn from(e: csv::Error) -> Self {
        SimError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
