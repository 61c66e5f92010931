//! Error types shared across the toolkit.

use thiserror::Error;

/// Errors produced by symbol evaluation, quadrature, assembly and eigensolves.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// Evaluation requested exactly on a singular point of the symbol.
    #[error("symbol undefined at (x, ω) = ({x:?}, {omega:?}): {reason}")]
    SymbolDomain {
        x: Vec<f64>,
        omega: Vec<f64>,
        reason: String,
    },

    /// A grid does not cover the support required by the operation.
    #[error("grid coverage insufficient: required half-width {required}, grid has {actual}")]
    Coverage { required: f64, actual: f64 },

    /// Mismatched grids or vector shapes.
    #[error("incompatible shapes: {0}")]
    Shape(String),

    /// Operation only implemented for phase-space dimension d = 1.
    #[error("unsupported dimension d = {0} (this operation is implemented for d = 1)")]
    UnsupportedDimension(usize),

    /// Structurally invalid input (bad coefficient table, bad config, ...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// Numeric failure: non-finite accumulation, eigensolver breakdown, ...
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// File I/O failure, with the offending path.
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, CoreError>;
