//! Error types shared across the lab.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LabError {
    /// A landscape violated the positivity / two-minima / tail assumptions.
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),

    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Adaptive quadrature failed to converge to the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureError(String),

    /// The eigensolver did not converge.
    #[error("eigensolver failed: {0}")]
    SolverError(String),

    /// A wavepacket is under-resolved by the spectral grid.
    #[error("grid resolution too coarse: {0}")]
    ResolutionError(String),

    /// A trajectory exceeded its intrinsic-time budget without hitting.
    #[error("trajectory exceeded max intrinsic time s = {0}")]
    Timeout(f64),

    /// Every trajectory in a Monte Carlo batch timed out.
    #[error("no trajectory hit the target ({0} timeouts)")]
    NoHits(usize),

    /// Detection probability underflowed at every trial time.
    #[error("detection probability underflowed over the whole tau bracket")]
    NoDetection,

    /// Config file rejected.
    #[error("config error: {0}")]
    ConfigError(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
