use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("inversion of zero")]
    ZeroInversion,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid encoding: {0}")]
    InvalidEncoding(&'static str),

    #[error("malformed {what}: {reason}")]
    Malformed { what: &'static str, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tree commitments are stale; call root_commitment first")]
    DirtyTree,

    #[error("index {index} out of range for depth {depth}")]
    IndexOutOfRange { index: u64, depth: u32 },

    #[error("depth mismatch: circuit has depth {expected}, branch has {actual}")]
    DepthMismatch { expected: usize, actual: usize },

    #[error("assignment does not satisfy the constraint system")]
    Unsatisfied,

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn malformed(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Malformed { what, reason: reason.into() }
    }
}
