use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dual reflection needs an even dimension, got {0}")]
    OddDualDimension(usize),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("invalid generalized reflection: {0}")]
    InvalidReflection(String),
    #[error("matrix is not a real element of the dual structure: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    RealityViolation { defect: f64, tol: f64 },
    #[error("matrix is not normal: commutation defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotNormal { defect: f64, tol: f64 },
    #[error("matrix is singular or near-singular: smallest singular value {0:.3e}")]
    Singular(f64),
    #[error("point coincides with a grid cell center")]
    AtCenter,
    #[error("the two matrices carry different reflections")]
    StructureMismatch,
    #[error("matrix is not self-adjoint: defect {0:.3e}")]
    NotSelfAdjoint(f64),
    #[error("matrix is too far from the target group: defect {0:.3e}")]
    TooFarFromGroup(f64),
    #[error("empty input")]
    EmptyInput,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("eigenvalue iteration failed to converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;
