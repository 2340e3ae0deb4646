//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A format triple violates its invariants.
    #[error("invalid Pfaffian format: {0}")]
    InvalidFormat(String),

    /// Integer overflow while composing format components.
    #[error("format arithmetic overflow in {0}")]
    FormatOverflow(&'static str),

    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),

    /// Operation asked for a (loss, last-layer, activation) combination the
    /// published results do not cover.
    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Network output left the valid BCE range by more than the clamping
    /// tolerance.
    #[error("BCE output {value} outside [0, 1] at sample {sample}")]
    BceRange { value: f64, sample: usize },

    /// Loss evaluated to NaN/inf at a grid node during field sampling.
    #[error("non-finite loss value at grid node {node:?}")]
    NonFiniteValue { node: Vec<usize> },

    #[error("cubical complex violates closure: {0}")]
    ClosureViolation(String),

    /// One entry per invalid config field, "path: message".
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user configuration rather than runtime
    /// failure; the CLI maps these to exit code 2.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidInput(_)
                | Error::InvalidArchitecture(_)
                | Error::Unsupported(_)
                | Error::InvalidFormat(_)
        )
    }
}
