use thiserror::Error;

/// Errors raised by distribution construction, the analytic engines and the
/// simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("numeric failure in {context}: {diagnostics}")]
    Numeric { context: String, diagnostics: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numeric(context: impl Into<String>, diagnostics: impl Into<String>) -> Self {
        Error::Numeric {
            context: context.into(),
            diagnostics: diagnostics.into(),
        }
    }
}
