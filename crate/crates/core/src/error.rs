use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point has non-finite coordinates")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero direction")]
    ZeroDirection,

    #[error("zero point in input (index {0})")]
    ZeroPoint(usize),

    #[error("body is unbounded: gauge {value:e} below 1e-9 on a probe direction")]
    Unbounded { value: f64 },

    #[error("body cannot be sampled uniformly: {0}")]
    Unsamplable(String),

    #[error("body too thin for rejection sampling ({proposals} proposals)")]
    TooThin { proposals: u64 },

    #[error("no closed-form volume for {0}")]
    NoClosedFormVolume(String),

    #[error("center cap {cap} exceeded; at least {partial} centers needed")]
    CenterCap { cap: usize, partial: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("empty cone around a test direction; use a larger cloud or a wider cone")]
    EmptyCone,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
