use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("pattern mismatch between u and x")]
    PatternMismatch,
    #[error("empty direction set: {0}")]
    EmptyDirections(String),
    #[error("construction infeasible at step `{step}`: {detail}")]
    Construction { step: String, detail: String },
    #[error("degenerate rotation: squared height {0} <= 1")]
    DegenerateRotation(String),
    #[error("value range miss: {0}")]
    BoundMiss(String),
    #[error("linear program infeasible: {0}")]
    LpInfeasible(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("not found: {0}")]
    NotFound(String),
}

impl Error {
    /// Stable machine-readable tag for reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::KOutOfRange { .. } => "K_OUT_OF_RANGE",
            Error::TooLarge(_) => "TOO_LARGE",
            Error::Parse(_) => "PARSE",
            Error::Invalid(_) => "INVALID",
            Error::PatternMismatch => "PATTERN_MISMATCH",
            Error::EmptyDirections(_) => "EMPTY_DIRECTIONS",
            Error::Construction { .. } => "CONSTRUCTION",
            Error::DegenerateRotation(_) => "DEGENERATE_ROTATION",
            Error::BoundMiss(_) => "BOUND_MISS",
            Error::LpInfeasible(_) => "LP_INFEASIBLE",
            Error::Budget(_) => "BUDGET",
            Error::NotFound(_) => "NOT_FOUND",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
