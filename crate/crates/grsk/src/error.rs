use thiserror::Error;

#[derive(Debug, Error)]
pub enum GrskError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("quadrature budget exceeded (achieved relative error {achieved:.3e})")]
    Budget { achieved: f64 },
}

pub type Result<T> = std::result::Result<T, GrskError>;
