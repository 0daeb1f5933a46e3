use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),

    #[error("root finder failed: {0}")]
    RootFinder(String),

    #[error("degenerate leading coefficient: {0}")]
    DegenerateLeading(String),

    #[error("no Hopf frequency: b1 = {b1:.6e} must be positive")]
    NoHopfFrequency { b1: f64 },

    #[error("singular direction: omega = {omega} is within the refusal window of sqrt(alpha/tau) = {singular}")]
    SingularDirection { omega: f64, singular: f64 },

    #[error("simulation diverged at step {step} (t = {time})")]
    Divergence { step: u64, time: f64 },

    #[error("delay of {requested} steps exceeds history capacity {capacity}")]
    HistoryOverflow { requested: usize, capacity: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("fit quality: {0}")]
    FitQuality(String),
}

pub type Result<T> = std::result::Result<T, FieldError>;
