use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed combinatorics (bad face cycle, dangling index, ...).
    #[error("structural error: {0}")]
    Structural(String),
    /// Lookup of an unknown vertex, face or generator.
    #[error("lookup error: {0}")]
    Lookup(String),
    /// Missing or contradictory configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// A documented precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Input shape the engine does not handle.
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// The ODE integrator could not continue.
    #[error("integrator failure at t = {t}: {reason}")]
    Integrator { t: f64, reason: String },
    /// A layout loop failed to close.
    #[error("layout misclosure {residual:.3e} exceeds tolerance {tolerance:.3e} at vertex {vertex}")]
    Misclosure {
        residual: f64,
        tolerance: f64,
        vertex: usize,
    },
    /// Not enough samples for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
