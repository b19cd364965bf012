use thiserror::Error;

/// Errors surfaced by constructions, engines and document handling.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero direction: a sphere point needs at least one nonzero coordinate")]
    ZeroDirection,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("regime mismatch: {0}")]
    Regime(String),
    #[error("cover too large for exact enumeration: {sets} sets exceeds cap {cap}")]
    OverCap { sets: usize, cap: usize },
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("no parameter set found: {0}")]
    NoParameters(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
