use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two states or operators do not share a wire layout.
    #[error("layout mismatch: {0}")]
    Layout(String),

    /// A protocol precondition or postcondition did not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Requested problem exceeds a hard size limit.
    #[error("size limit exceeded: {0}")]
    Size(String),

    /// Time reversal of a resource expression containing classical bits.
    #[error("time-reversal undefined for cbits")]
    ReverseUndefined,

    /// Text could not be parsed; `pos` is a byte offset into the input.
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Unknown registry name (gate or experiment).
    #[error("unknown name `{0}`")]
    UnknownName(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
