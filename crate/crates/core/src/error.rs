use thiserror::Error;

/// Errors raised by the operator, algebra and homology routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular operator: {0}")]
    Singular(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("orthogonal supports: tr(a*b) = {trace:e} is below the floor {floor:e}")]
    OrthogonalSupport { trace: f64, floor: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed structure: {0}")]
    Structure(String),

    #[error("not Hermitian: max |A - A^H| entry = {max_deviation:e} exceeds {tol:e}")]
    HermitianViolation { max_deviation: f64, tol: f64 },

    #[error("not positive semidefinite: smallest eigenvalue {min_eigenvalue:e} below -{tol:e}")]
    NegativeEigenvalue { min_eigenvalue: f64, tol: f64 },

    #[error("not strictly positive: smallest eigenvalue {min_eigenvalue:e} below floor {floor:e}")]
    BelowStrictFloor { min_eigenvalue: f64, floor: f64 },

    #[error("trace violation: |tr - 1| = {deviation:e} exceeds {tol:e}")]
    TraceViolation { deviation: f64, tol: f64 },

    #[error("invalid tolerance profile: {0}")]
    Tolerance(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!("dimension mismatch: {a}x{a} vs {b}x{b}")));
    }
    Ok(())
}
