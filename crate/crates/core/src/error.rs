use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("scalar kind mismatch: {left:?} vs {right:?}")]
    ScalarKindMismatch {
        left: crate::ScalarKind,
        right: crate::ScalarKind,
    },
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("real tensor has a non-zero imaginary part at position {0}")]
    ImaginaryInReal(usize),
    #[error("invalid mode {0}, expected 1, 2 or 3")]
    InvalidMode(usize),
    #[error("matrix is not Hermitian (relative deviation {deviation:.3e} > {tolerance:.3e})")]
    NonHermitianInput { deviation: f64, tolerance: f64 },
    #[error("eigensolver did not converge on a {0}x{0} matrix")]
    ConvergenceFailure(usize),
    #[error("cannot decide: mode-{mode} spectrum has gap {gap:.3e}")]
    CannotDecide { mode: usize, gap: f64 },
    #[error("eps {eps:.3e} outside the admissible range (must be below {limit:.3e})")]
    EpsOutOfRange { eps: f64, limit: f64 },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dims_mismatch(expected: impl std::fmt::Debug, found: impl std::fmt::Debug) -> Error {
    Error::DimensionMismatch {
        expected: format!("{expected:?}"),
        found: format!("{found:?}"),
    }
}
