use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not invertible over the integers")]
    NotInvertible,

    #[error("convolution support exceeded {cap} atoms at step {step}; switch to Monte Carlo mode")]
    AtomCapExceeded { cap: usize, step: usize },

    #[error("orbit exploration exceeded cap of {cap} points")]
    OrbitCapExceeded { cap: usize },

    #[error("rationality of {0} is not declared; tag it as exact, a named surd, or irr:<decimal>")]
    RationalityUnknown(String),

    #[error("undecidable at current precision: {0}")]
    Undecidable(String),

    #[error("incompatible pairing: {0}")]
    Incompatible(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error in {file}: {message}")]
    Config { file: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
