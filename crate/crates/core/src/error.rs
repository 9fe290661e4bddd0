use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode {mode} out of range for a {modes}-mode space")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("invalid cutoffs: {0}")]
    InvalidCutoffs(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace {trace} is not 1")]
    BadTrace { trace: f64 },
    #[error("matrix is not positive (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("ket norm deviates from 1 by {deviation:e}")]
    NotNormalized { deviation: f64 },
    #[error("truncation leak: lost trace {lost:e} exceeds {tolerance:e}")]
    TruncationLeak { lost: f64, tolerance: f64 },
    #[error("cutoff {given} below required {required}")]
    InsufficientCutoff { given: usize, required: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
    #[error("product kets do not share a mode structure")]
    ModeStructureMismatch,
    #[error("dense dimension {dim} exceeds limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },
    #[error("quadrature did not converge: estimate {estimate}, error {error:e}")]
    QuadratureNotConverged { estimate: f64, error: f64 },
    #[error("grid integral {integral} deviates from 1 beyond tolerance")]
    Normalization { integral: f64 },
    #[error("grid boundary leak: edge/peak ratio {ratio:e}")]
    BoundaryLeak { ratio: f64 },
    #[error("grid does not cover the state: integral {integral}")]
    Coverage { integral: f64 },
    #[error("positivity violated at tau = {tau}: min eigenvalue {min_eigenvalue:e}")]
    PositivityViolation { tau: f64, min_eigenvalue: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("single-mode state required, got {modes} modes")]
    NotSingleMode { modes: usize },
}
