//! Crate-wide error type.
//!
//! The bounded decision procedures distinguish three failure flavors that
//! callers treat differently: invalid input (caller bug), unsupported shape
//! (outside the implemented grammar, named explicitly), and inconclusive
//! searches that exhausted a bound without an answer.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{op}: invalid input: {detail}")]
    Invalid { op: &'static str, detail: String },

    #[error("{op}: unsupported: {detail}")]
    Unsupported { op: &'static str, detail: String },

    /// A bounded search ran out of budget without deciding. Carries the
    /// exhausted bound so callers can retry with a larger one.
    #[error("{op}: inconclusive after exhausting bound {bound}: {detail}")]
    Inconclusive {
        op: &'static str,
        bound: u64,
        detail: String,
    },

    #[error("{op}: scale limit exceeded: {detail}")]
    Scale { op: &'static str, detail: String },

    #[error("malformed complex: {0}")]
    MalformedComplex(String),
}

impl Error {
    pub fn invalid(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Invalid {
            op,
            detail: detail.into(),
        }
    }

    pub fn unsupported(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Unsupported {
            op,
            detail: detail.into(),
        }
    }

    pub fn inconclusive(op: &'static str, bound: u64, detail: impl Into<String>) -> Self {
        Error::Inconclusive {
            op,
            bound,
            detail: detail.into(),
        }
    }

    pub fn scale(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Scale {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
