//! Error type shared by all modules.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A measure failed validation (unsorted atoms, bad mass, ...).
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// A scalar parameter was out of its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Tensorized path quadrature would need more Gaussian layers than the
    /// budget allows and no Monte Carlo fallback was requested.
    #[error(
        "path expectation needs {layers} Gaussian layers (budget {limit}); \
         request the Monte Carlo fallback to evaluate this measure"
    )]
    TooManyLayers { layers: usize, limit: usize },

    /// A quotient such as G(s,t) hit a numerically degenerate denominator.
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    /// A computation produced a non-finite intermediate value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Problem size exceeds a hard resource cap (e.g. 2^N enumeration).
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// File-system error from the CLI layer.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization error from the CLI layer.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
