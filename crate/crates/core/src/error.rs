use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested accuracy could not be reached; carries the best
    /// achieved relative error bound.
    #[error("accuracy loss: requested {requested:e}, achieved only {achieved:e} ({context})")]
    AccuracyLoss {
        requested: f64,
        achieved: f64,
        context: String,
    },

    /// A norm or integral diverges for the given parameters.
    #[error("divergent integral: {0}")]
    Divergence(String),

    /// Inconsistent or invalid configuration (regime/kernel mismatch,
    /// violated stability condition, bad schedule, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Structurally invalid input data (unordered events, mismatched
    /// lengths, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The operation does not support this kernel variant.
    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),

    /// The event-count explosion guard tripped.
    #[error("explosion guard: event count exceeded cap of {cap}")]
    ExplosionGuard { cap: usize },

    /// Not enough data to form the requested estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
