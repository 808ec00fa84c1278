use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator count mismatch: {left} vs {right}")]
    GeneratorMismatch { left: usize, right: usize },
    #[error("generator index {index} out of range 1..={count}")]
    GeneratorOutOfRange { index: usize, count: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("polynomial degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("point outside chart domain: {0}")]
    OutsideChart(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("curvature tensor rejected: {0}")]
    CurvatureSymmetry(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("grid resolution {0} too small (need at least 4)")]
    Resolution(usize),
    #[error("cutoff {cutoff} too small for degree {degree} (need at least {needed})")]
    Cutoff {
        cutoff: usize,
        degree: i64,
        needed: usize,
    },
    #[error("ill-conditioned Gram matrix: {0}")]
    IllConditioned(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal cross-check disagreement: {0}")]
    CrossCheck(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
