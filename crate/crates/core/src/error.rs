use thiserror::Error;

/// Errors raised by the library. Negative verdicts (failed tracking,
/// refused certificates) are values, not errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported dimension {0} (expected 1 or 2)")]
    UnsupportedDimension(usize),

    #[error("point set is empty")]
    EmptySet,

    #[error("invalid map: {0}")]
    Construction(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sequence is not a {delta}-pseudo-orbit: gap {gap} at index {index}")]
    NotPseudoOrbit { index: i64, gap: f64, delta: f64 },

    #[error("point is not {period}-periodic (return distance {distance:e})")]
    NotPeriodic { period: usize, distance: f64 },

    #[error("non-isolated periodic set: det(A^{0} - I) = 0")]
    NonIsolatedPeriodicSet(usize),

    #[error("periodic set too large to enumerate: {0} points")]
    TooManyPeriodicPoints(u128),

    #[error("matrix is not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("failed to parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
