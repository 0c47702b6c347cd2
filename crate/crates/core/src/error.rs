use std::io;

use thiserror::Error;

/// Errors produced by the dithering pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid BLUT: {0}")]
    InvalidBlut(String),

    /// The BLUT has no positive slope over its mid/high range, so there is
    /// nothing to modulate the noise with.
    #[error("flat BLUT: maximum slope over mid/high regions is not positive")]
    FlatBlut,

    #[error("invalid pattern bank: {0}")]
    InvalidBank(String),

    #[error("corrupt bank file at byte {offset}: {reason}")]
    CorruptBank { offset: usize, reason: String },

    #[error("malformed image: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_arg(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
