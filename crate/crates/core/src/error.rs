use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("zero operator cannot be normalized")]
    ZeroNormalization,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("evaluation values do not come from a real polynomial (imaginary residue {residue:e})")]
    InterpolationInconsistency { residue: f64 },

    #[error("divisor nearly vanishes at a root of unity (|value| = {magnitude:e})")]
    DivisionInstability { magnitude: f64 },

    #[error("singular value decomposition did not converge")]
    SvdFailure,

    #[error("no gap separates the numerical rank at epsilon = {eps:e}")]
    SeparationFailure { eps: f64 },

    #[error("no left null vector yields a divisor of degree {degree}")]
    ExtractionFailure { degree: usize },

    #[error("candidate divisor rejected: {0}")]
    RejectedCandidate(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::ZeroNormalization => "zero_normalization",
            Error::DivisionByZero => "division_by_zero",
            Error::InterpolationInconsistency { .. } => "interpolation_inconsistency",
            Error::DivisionInstability { .. } => "division_instability",
            Error::SvdFailure => "svd_failure",
            Error::SeparationFailure { .. } => "separation_failure",
            Error::ExtractionFailure { .. } => "extraction_failure",
            Error::RejectedCandidate(_) => "rejected_candidate",
            Error::Parse { .. } => "parse_error",
            Error::Io(_) => "io_error",
            Error::Json(_) => "json_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
