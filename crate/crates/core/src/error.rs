use thiserror::Error;

/// Errors reported by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoissonError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfig(String),

    #[error("line length mismatch: plan expects {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("extent mismatch: expected {expected:?}, got {found:?}")]
    ExtentMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("non-finite value {value} at flat index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("dense oracle limited to {limit} unknowns, got {unknowns}")]
    SizeGuard { unknowns: usize, limit: usize },

    #[error("manufactured case does not match the solver configuration: {0}")]
    CaseMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instability at step {step}: {detail}")]
    Instability { step: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, PoissonError>;
