use thiserror::Error;

use crate::path::AliceMode;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("amplitudes are not normalized: sum of squared moduli misses 1 by {deficit:e}")]
    Unitarity { deficit: f64 },

    #[error("alice mode {0:?} has no alice detectors")]
    Mode(AliceMode),

    #[error("sampling too coarse: {reason}; need at least {required} samples")]
    Sampling { reason: String, required: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
