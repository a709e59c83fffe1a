use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RetractError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("not a polynomial: {0}")]
    NotPolynomial(String),

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("outside the admissible domain: {0}")]
    Domain(String),

    #[error("point is not on the boundary (gauge {gauge})")]
    NotOnBoundary { gauge: f64 },

    #[error("gauge vanishes along this direction")]
    UnboundedDirection,

    #[error("trivial input: {0}")]
    TrivialInput(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
}

impl RetractError {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            RetractError::InternalContradiction(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, RetractError>;
