use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid piece on [{lo}, {hi}): {reason}")]
    InvalidPiece { lo: f64, hi: f64, reason: String },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("search box is empty or not finite: lo={lo:?}, hi={hi:?}")]
    EmptySearchBox { lo: Vec<f64>, hi: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("evidence integral is zero")]
    ZeroEvidence,

    #[error("evidence integral is not finite ({0})")]
    DivergentEvidence(f64),

    #[error("counterexample cutoff too small: max_bump = {max_bump}, need at least {needed}")]
    CutoffTooSmall { max_bump: u32, needed: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid_piece(lo: f64, hi: f64, reason: impl Into<String>) -> Self {
        Error::InvalidPiece {
            lo,
            hi,
            reason: reason.into(),
        }
    }
}
