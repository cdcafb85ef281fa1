use thiserror::Error;

use crate::metric::MetricError;

/// Errors raised by instance construction, the online runners and the oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Metric(#[from] MetricError),

    #[error("invalid instance: {0}")]
    Instance(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("index {index} out of range (size {size})")]
    OutOfRange { index: usize, size: usize },

    #[error("invalid phase parameters: {0}")]
    Params(String),

    #[error("capacity exceeded: {what} needs {needed}, limit {limit}")]
    Capacity { what: &'static str, needed: u128, limit: u128 },

    #[error("trace does not match instance: {0}")]
    Trace(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
