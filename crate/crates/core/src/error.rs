use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid precision: {0}")]
    Precision(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{func} has a pole at {at}")]
    Pole { func: &'static str, at: String },

    #[error("{what} did not converge within {limit} iterations")]
    NonConvergence { what: &'static str, limit: usize },

    #[error("matrix structure check failed: {0}")]
    Structure(String),

    #[error("even-simple condition violated: {0}")]
    EvenSimpleViolation(String),

    #[error("degenerate normalization: {0}")]
    DegenerateNormalization(String),

    #[error("secular root count mismatch: expected {expected}, found {found}")]
    RootCountMismatch { expected: usize, found: usize },

    #[error("determinant/spectrum identity violated: {0}")]
    IdentityViolation(String),

    #[error("|s| = {s} exceeds the oscillation budget {limit}")]
    OscillationBudgetExceeded { s: f64, limit: f64 },

    #[error("zero scan found {coarse} sign changes at the base step but {fine} at half step")]
    MissedZeroSuspected { coarse: usize, fine: usize },

    #[error("cache mismatch: {0}")]
    CacheMismatch(String),

    #[error("malformed input at line {line}: {detail}")]
    Format { line: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn format(line: usize, detail: impl Into<String>) -> Self {
        Error::Format {
            line,
            detail: detail.into(),
        }
    }
}
