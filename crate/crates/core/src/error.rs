use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("domain error: {0}")]
    Domain(String),

    /// Symmetric factorization failed even after the jitter retry.
    #[error("matrix is not positive definite: pivot {pivot} = {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("singular matrix: pivot {pivot} = {value:e}")]
    Singular { pivot: usize, value: f64 },

    #[error("potential overflow: |lambda * r_{index}| = {argument:e} exceeds clamp")]
    Divergence { index: usize, argument: f64 },

    #[error("step unbounded after {resamples} resamples")]
    StepUnbounded { resamples: usize },

    #[error("positivity lost at coordinate {index}")]
    PositivityLost { index: usize },

    #[error("centering failed after {iterations} inner iterations (residual {residual:e})")]
    CenteringFailed { iterations: usize, residual: f64 },

    #[error("oracle refused instance: {0}")]
    OracleGuard(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn dims(op: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            op,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    /// Errors that stem from floating point trouble rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::Singular { .. }
                | Error::Divergence { .. }
                | Error::StepUnbounded { .. }
                | Error::PositivityLost { .. }
                | Error::CenteringFailed { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
