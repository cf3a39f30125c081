use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// `(zB - A)` has a zero or near-zero pivot at shift `z`.
    #[error("singular shift z = {z} (quadrature node {node:?})")]
    SingularShift { z: Complex64, node: Option<usize> },

    #[error("all columns dropped: block has numerical rank zero")]
    RankZero,

    #[error("B is not positive definite (Cholesky pivot {pivot:e} at index {index})")]
    IndefiniteB { index: usize, pivot: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dense oracle capped at n = {cap}, got n = {n}")]
    OracleCap { n: usize, cap: usize },

    #[error("format error in {source_name} at line {line}: {msg}")]
    Format {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error("cut undefined: interval holds {0} eigenvalues, need at least 2")]
    CutUndefined(usize),

    #[error("empty spectrum prediction")]
    EmptyPrediction,

    #[error("no eigenvalues found inside the contour (expected {expected})")]
    NoEigenvaluesFound { expected: usize },

    #[error("no convergence after {iterations} iterations (best residual {best_residual:e})")]
    Convergence {
        iterations: usize,
        best_residual: f64,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported schema version {0}")]
    Version(u32),

    #[error("metric error: {0}")]
    Metric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format(source_name: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            source_name: source_name.into(),
            line,
            msg: msg.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_)
            | Error::Format { .. }
            | Error::Parameter(_)
            | Error::Dimension(_)
            | Error::OracleCap { .. }
            | Error::EmptyPrediction
            | Error::Version(_) => 2,
            Error::SingularShift { .. }
            | Error::RankZero
            | Error::IndefiniteB { .. }
            | Error::CutUndefined(_)
            | Error::NoEigenvaluesFound { .. }
            | Error::Convergence { .. }
            | Error::Metric(_) => 3,
            Error::Validation(_) => 4,
        }
    }
}
