use thiserror::Error;

/// Failure categories shared by every module.
///
/// The CLI maps these onto exit codes: contract-style failures exit with 2,
/// numerical non-convergence and work caps exit with 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not dissipative: minimum eigenvalue of the real part is {min_eig:.3e}")]
    NotDissipative { min_eig: f64 },
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("precision limit: {0}")]
    Precision(String),
    #[error("size limit: {0}")]
    Size(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Convergence(_) | Error::Cap(_) | Error::Precision(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
