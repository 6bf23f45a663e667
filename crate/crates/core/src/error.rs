use thiserror::Error;

use crate::spectral::Part;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("part density {0} is identically zero")]
    DegenerateMeasure(Part),

    #[error("proposal envelope failure for {part}: acceptance rate {rate:.3e} after {proposals} proposals")]
    EnvelopeFailure {
        part: Part,
        rate: f64,
        proposals: u64,
    },

    #[error("tensor quadrature supports d <= {max}, got d = {dim}")]
    UnsupportedDimension { dim: usize, max: usize },

    #[error("subset must contain at least 2 points, got {0}")]
    EmptySubset(usize),

    #[error("nonzero mass for {0} but its frequency bank is empty")]
    MassBankMismatch(Part),

    #[error("reference matrix has zero Frobenius norm")]
    ZeroNorm,

    #[error("probability must lie in (0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("line {line}: parse error: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: format error: {msg}")]
    Format { line: usize, msg: String },

    #[error("training labels contain a single class")]
    SingleClass,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag, used for structured CLI errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Overflow(_) => "overflow",
            Error::DegenerateMeasure(_) => "degenerate_measure",
            Error::EnvelopeFailure { .. } => "envelope_failure",
            Error::UnsupportedDimension { .. } => "unsupported_dimension",
            Error::EmptySubset(_) => "empty_subset",
            Error::MassBankMismatch(_) => "mass_bank_mismatch",
            Error::ZeroNorm => "zero_norm",
            Error::InvalidProbability(_) => "invalid_probability",
            Error::Parse { .. } => "parse",
            Error::Format { .. } => "format",
            Error::SingleClass => "single_class",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
