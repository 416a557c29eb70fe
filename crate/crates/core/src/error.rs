use thiserror::Error;

/// Errors produced by the barrier machinery, the solvers and the loaders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constraint is not strictly satisfied where the barrier needs it to be.
    #[error("constraint {index} is not strictly satisfied (g = {value:e})")]
    BoundaryViolation { index: usize, value: f64 },

    #[error("objective gradient vanishes")]
    DegenerateObjectiveGradient,

    /// The objective and constraint gradients are (anti)parallel.
    #[error("gradients are (anti)parallel: 1 - cos^2 = {0:e}")]
    DegenerateGeometry(f64),

    #[error("search direction has zero length")]
    ZeroDirection,

    /// Cholesky factorization hit a non-positive pivot.
    #[error("matrix is not positive definite (pivot {pivot}, value {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("equality matrix is rank deficient (pivot {pivot})")]
    RankDeficient { pivot: usize },

    #[error("starting point is not strictly feasible (constraint {index}, g = {value:e})")]
    InfeasibleStart { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown problem id `{0}`")]
    UnknownProblemId(String),

    #[error("argument outside its domain: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("phase-I initialization found no positive definite slack after {steps} steps")]
    Phase1Failure { steps: usize },

    #[error("no strictly interior starting point found: {0}")]
    NoInteriorPoint(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
