use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one of the CLI exit
/// classes (see `Error::exit_code`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

impl Error {
    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn cap(msg: impl Into<String>) -> Self {
        Error::CapExceeded(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// Process exit code: 3 for cap violations, 4 for bad input, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded(_) => 3,
            Error::Validation(_) | Error::Argument(_) => 4,
            Error::Structural(_) | Error::Precondition(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
