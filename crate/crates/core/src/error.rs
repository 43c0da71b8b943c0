//! Crate-wide error type.

use thiserror::Error;

/// Unified error type for every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is out of range or inconsistent.
    #[error("parameter fault: {0}")]
    Parameter(String),

    /// Malformed textual input (catalog, config, transcript, or operator string).
    #[error("parse error: {0}")]
    Parse(String),

    /// A code record failed validation against its declared parameters.
    #[error("code validation failed: {0}")]
    Validation(String),

    /// A request exceeds a documented capacity limit of this desk-scale tool.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// No catalog entry satisfies a selection target.
    #[error("selection failed: {0}")]
    Selection(String),

    /// Internal protocol bookkeeping detected an out-of-order message flow.
    #[error("protocol order fault: {0}")]
    ProtocolOrder(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
