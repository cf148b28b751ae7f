use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("argument outside the function's domain: {0}")]
    DomainError(String),
    #[error("precondition violated: {0}")]
    PrecondError(String),
    #[error("quadrature failed: {0}")]
    QuadFail(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("singular matrix: {0}")]
    SingularMatrix(String),
    #[error("matrix is not diagonalizable: {0}")]
    NonDiagonalizable(String),
    #[error("theorem hypothesis not verified: {0}")]
    HypothesisUnverified(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, SpectraError>;

impl From<serde_json::Error> for SpectraError {
    fn from(e: serde_json::Error) -> Self {
        SpectraError::Parse(e.to_string())
    }
}

impl From<std::io::Error> for SpectraError {
    fn from(e: std::io::Error) -> Self {
        SpectraError::Io(e.to_string())
    }
}
