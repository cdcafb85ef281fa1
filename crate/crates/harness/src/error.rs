use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// The document does not follow the instance schema.
    #[error("{location}: {message}")]
    Schema { location: String, message: String },

    /// A semantic check failed at a known place in the document.
    #[error("{location}: {source}")]
    Invalid {
        location: String,
        #[source]
        source: boundedwfa_core::Error,
    },

    #[error(transparent)]
    Core(#[from] boundedwfa_core::Error),

    #[error("invalid trace: {0}")]
    Trace(String),

    /// Traces or instances that were expected to describe the same run do not.
    #[error("mismatched instances: {0}")]
    Mismatch(String),

    #[error("{0} is intractable for the exact oracle on this instance")]
    Intractable(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Schema { location: location.into(), message: message.into() }
    }

    /// Process exit code: 2 for capacity and oracle failures, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core(boundedwfa_core::Error::Capacity { .. })
            | Self::Invalid { source: boundedwfa_core::Error::Capacity { .. }, .. }
            | Self::Intractable(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
