//! Error type shared by all library modules.

/// Errors reported by configuration validation and the numerical operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A configuration value violates its documented constraint.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Two traces or curves that must share a grid do not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// SNR requested against an identically zero noise trace.
    #[error("undefined SNR: noise trace is identically zero")]
    UndefinedSnr,

    /// Input data cannot support the requested operation (e.g. all-zero trace).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Records passed to an aggregate do not form a single (tau, snr) group.
    #[error("grouping error: {0}")]
    Grouping(String),
}

pub type Result<T> = std::result::Result<T, Error>;
