use thiserror::Error;

/// Errors raised by the algebraic engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An operation was applied outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A truncated computation could not certify any coefficient.
    #[error("truncation error: {0}")]
    Truncation(String),
    /// A configuration or lattice-spec file was rejected.
    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { message: String, line: Option<usize> },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn truncation(msg: impl Into<String>) -> Self {
        Error::Truncation(msg.into())
    }

    pub fn config(msg: impl Into<String>, line: Option<usize>) -> Self {
        Error::Config {
            message: msg.into(),
            line,
        }
    }

    pub fn is_truncation(&self) -> bool {
        matches!(self, Error::Truncation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
