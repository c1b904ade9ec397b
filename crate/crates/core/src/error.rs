use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("metric is not positive-definite (smallest eigenvalue {min_eigenvalue:e})")]
    NonPositiveMetric { min_eigenvalue: f64 },
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("complexified volume vanishes (|(β+iα)^n| = {modulus:e})")]
    VanishingComplexifiedVolume { modulus: f64 },
    #[error("reference class χ is not positive")]
    NonPositiveChi,
    #[error("metric-intent field lost positivity at grid index {index}")]
    LostPositivity { index: usize },
    #[error("symplectic potential is not strictly convex at node {index}")]
    LostConvexity { index: usize },
    #[error("phase {0} outside the admissible range")]
    PhaseOutOfRange(f64),
    #[error("input pair does not solve the dHYM equation (residual {residual:e})")]
    NotDHYMSolution { residual: f64 },
    #[error("volume mismatch: {left} vs {right}")]
    VolumeMismatch { left: f64, right: f64 },
    #[error("degenerate phase: |sin θ̂| = {0:e}")]
    DegeneratePhase(f64),
    #[error("no convergence after {iterations} iterations (last residual {last_residual:e})")]
    NonConvergence { iterations: usize, last_residual: f64, history: Vec<f64> },
    #[error("potential path left the calibrated set")]
    LostCalibration,
    #[error("ε too small: lifted form lost positivity")]
    EpsilonTooSmall,
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}
