use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A structural precondition on the inputs does not hold.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A finite bound (arity, vertices, carrier size) was exceeded. Results are never
    /// silently truncated; callers must raise the bound or shrink the input.
    #[error("truncation: {what} needs {needed}, bound is {bound}")]
    Truncation {
        what: String,
        needed: usize,
        bound: usize,
    },

    /// The requested construction is not computable for this kind of input
    /// (for example colimits of algebras over a theory with infinite values).
    #[error("unsupported: {0}")]
    Capability(String),

    /// A serialized document could not be decoded.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

pub(crate) fn truncation(what: impl Into<String>, needed: usize, bound: usize) -> Error {
    Error::Truncation {
        what: what.into(),
        needed,
        bound,
    }
}
