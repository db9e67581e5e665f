//! Error type shared across the crate.

/// Errors raised by signal, layer, network and metric operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its mathematical domain (bad cutoff, factor < 2, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Array shapes are incompatible (length not divisible by stride, channel mismatch, ...).
    #[error("shape error: {0}")]
    Shape(String),
    /// A configuration document or network spec is invalid.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
