use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("quadrature did not converge after {panels} panels (error estimate {estimate:e})")]
    Convergence { panels: usize, estimate: f64 },

    #[error("tail fit failed: {0}")]
    Fit(String),

    #[error("invalid source distribution: {0}")]
    Source(String),

    #[error("source law is outside the log-moment class (E[ln(1+|X|)] = {0})")]
    NotInLogClass(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
