use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The enumerated state space would exceed the configured cap.
    #[error("state space has {count} states, which exceeds the cap of {cap}")]
    StateCap { count: u128, cap: usize },

    /// An operation restricted to small spaces was called on a larger one.
    #[error("{what} supports at most {limit} states, got {size}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    /// A numerical method failed to meet its accuracy target.
    #[error("numeric error: {what} (residual {residual:e})")]
    Numeric { what: &'static str, residual: f64 },

    /// Mixing-time evolution hit the step cap before reaching the target.
    #[error("mixing time exceeds the cap of {cap} steps (TV at cap = {tv})")]
    MixingTimeout { cap: usize, tv: f64 },

    /// Malformed experiment configuration or input string.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
