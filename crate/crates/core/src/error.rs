use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("residual {residual:.3e} exceeds tolerance {limit:.3e}")]
    ToleranceNotMet { residual: f64, limit: f64 },

    #[error("problem size {size} exceeds the desk-scale limit {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("zero-energy resonance suspected: |det A(i*1e-3)| = {det_abs:.3e}")]
    Resonant { det_abs: f64 },

    #[error("no convergence: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
