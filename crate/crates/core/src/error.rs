use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numerical input lies outside the domain of the operation.
    #[error("domain error: {name} = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    /// The O(N^2) overlap sums refuse to run above the configured stage cap.
    #[error("stage count {stages} exceeds the overlap-sum cap of {cap} (pass an explicit override to allow it)")]
    StageCap { stages: u64, cap: u64 },

    /// A malformed request, such as an invalid sweep specification.
    #[error("usage error: {field}: {message}")]
    Usage { field: String, message: String },

    #[error("output error: {0}")]
    Output(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: impl ToString, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value: value.to_string(),
            reason,
        }
    }

    pub(crate) fn usage(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Usage {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 1 for usage errors, 2 for numerical-domain errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage { .. } | Error::Output(_) => 1,
            Error::Domain { .. } | Error::StageCap { .. } => 2,
        }
    }
}
