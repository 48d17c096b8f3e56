use thiserror::Error;

/// Errors reported by the engine. All checks are exact; there are no
/// tolerance-related failure modes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("evaluation points must be pairwise distinct: {0}")]
    RepeatedPoints(String),
    #[error("incompatible module presentations: {0}")]
    PresentationMismatch(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
