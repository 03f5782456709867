use thiserror::Error;

/// Errors raised across the crate.
///
/// Each variant maps onto one failure family of the experiment harness; see
/// [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: String },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("query |xi| = {norm} lies outside the grid ball of radius {radius}")]
    OutOfDomain { norm: f64, radius: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("first moments differ by {gap:e} (tolerance {tolerance:e}); the GTW ratio diverges at the origin")]
    MeanMismatch { gap: f64, tolerance: f64 },

    #[error("empty ensemble or sample set")]
    Empty,

    #[error("explicit Euler step is unstable: dt*(lambda+mu)*N = {value} >= 1")]
    Unstable { value: f64 },

    #[error("Picard iteration did not reach tolerance {tolerance:e} within {iterations} iterations (last distance {last:e})")]
    NonConvergence {
        iterations: usize,
        tolerance: f64,
        last: f64,
        trace: Vec<f64>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error("malformed grid snapshot: {0}")]
    Snapshot(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the CLI: 1 validation, 2 numerical
    /// non-convergence, 3 assertion failure (I/O problems count as 1).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } => 2,
            Error::Assertion(_) => 3,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
