use thiserror::Error;

/// Errors produced by the trace-coordinate library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is numerically singular (condition estimate {condition:.3e})")]
    SingularMatrix { condition: f64 },

    #[error("determinant deviates from 1 by {residual:.3e}")]
    NotUnimodular { residual: f64 },

    #[error("flavor mismatch: {0}")]
    FlavorMismatch(String),

    #[error("eigenvalue solver failed to converge")]
    ConvergenceFailure,

    #[error("classification is ambiguous at the configured tolerance: {0}")]
    ToleranceAmbiguous(String),

    #[error("reducibility case mismatch: expected {expected}, found {found}")]
    CaseMismatch { expected: String, found: String },

    #[error("generator {0} is not loxodromic")]
    NotLoxodromic(&'static str),

    #[error("block decomposition failed: {0}")]
    DecompositionFailed(String),

    #[error("pair is not irreducible (span dimension {span_dimension})")]
    NotIrreducible { span_dimension: usize },

    #[error("no conjugator exists: {0}")]
    NoConjugator(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by malformed input rather than by the math.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::InvalidInput(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
