use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A mode specification violates its preconditions.
    #[error("invalid mode specification: {0}")]
    InvalidSpec(String),
    /// The requested regime is outside what the closed forms cover.
    #[error("unsupported regime: {0}")]
    Unsupported(String),
    /// The case is well formed but has no implementation.
    #[error("unimplemented case: {0}")]
    Unimplemented(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}
