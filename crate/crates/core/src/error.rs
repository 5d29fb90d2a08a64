use thiserror::Error;

use crate::spectral::Spectrum;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is off the surface by {defect:e} (tolerance {tol:e})")]
    OffSurface { defect: f64, tol: f64 },

    #[error("direction is not tangent to the ambient space (defect {0:e})")]
    NonTangent(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate element {index}: measure {measure:e}")]
    DegenerateElement { index: usize, measure: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("field length {got} does not match vertex count {expected}")]
    FieldMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("eigensolver did not converge; max residual {max_residual:e}")]
    NotConverged {
        max_residual: f64,
        partial: Box<Spectrum>,
    },

    #[error("eigenvalue {0} not found in spectrum")]
    EigenvalueNotFound(f64),

    #[error("insufficient spectrum depth: {0}")]
    InsufficientDepth(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
