use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("propagation failed for particle {particle} at t = {time}: {reason}")]
    Propagation {
        particle: usize,
        time: f64,
        reason: String,
    },

    #[error("sampled density {density} failed at t = {time}: {reason}")]
    SampledDensity {
        density: usize,
        time: f64,
        reason: String,
    },

    #[error("matrix is not Hurwitz: {0}")]
    NotHurwitz(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("{code}: {message}")]
    Config { code: &'static str, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(code: &'static str, msg: impl Into<String>) -> Self {
        Error::Config {
            code,
            message: msg.into(),
        }
    }

    /// Short machine-readable code, used by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::DimensionMismatch { .. } => "DIM_MISMATCH",
            Error::Unsupported(_) => "UNSUPPORTED",
            Error::Quadrature(_) => "QUADRATURE",
            Error::Propagation { .. } | Error::SampledDensity { .. } => "PROPAGATION",
            Error::NotHurwitz(_) => "NOT_HURWITZ",
            Error::Singular(_) => "SINGULAR",
            Error::NonConvergence(_) => "NONCONVERGENCE",
            Error::Config { code, .. } => code,
            Error::Io(_) => "IO",
            Error::Csv(_) => "CSV",
            Error::Json(_) => "JSON",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
