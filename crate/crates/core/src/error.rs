use thiserror::Error;

use crate::boundary::BoundaryTrajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The exponent polynomial does not decay at ±∞, or a symbol is malformed.
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    /// Quadrature could not meet its budget. Carries the best available estimate.
    #[error("quadrature accuracy not reached: best estimate {re:e}{im:+e}i, error {error:e} ({nodes} nodes)")]
    Accuracy {
        re: f64,
        im: f64,
        error: f64,
        nodes: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("found {} of {requested} requested zeros: {found:?}", found.len())]
    NotFound { found: Vec<f64>, requested: usize },

    /// The first x-derivative vanishes at a zero, so the slope ratio is undefined.
    #[error("double zero at t={t}, x={x}: first derivative {derivative:e} is too small")]
    DoubleZero { t: f64, x: f64, derivative: f64 },

    #[error("trajectory blew up at t={t}: {reason}")]
    BlowUp {
        t: f64,
        reason: String,
        partial: Box<BoundaryTrajectory>,
    },

    #[error("trajectory hit the singularity f=0 near t={t} (f={f:e})")]
    Singularity {
        t: f64,
        f: f64,
        partial: Box<BoundaryTrajectory>,
    },
}

impl Error {
    /// Partial trajectory carried by trace-truncating errors.
    pub fn partial_trajectory(&self) -> Option<&BoundaryTrajectory> {
        match self {
            Error::BlowUp { partial, .. } | Error::Singularity { partial, .. } => Some(partial),
            _ => None,
        }
    }
}
