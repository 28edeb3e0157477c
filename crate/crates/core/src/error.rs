use thiserror::Error;

use crate::stability::ClassicalSteadyState;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular elimination: |z| = {magnitude:e} (cavity modes resonant with the tunnelling splitting)")]
    SingularElimination { magnitude: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("initial state is not conjugate-paired at {label} (residual {residual:e})")]
    NotConjugatePaired { label: String, residual: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("time grids differ: {0}")]
    GridMismatch(String),

    #[error("eigensolver failed on a {dim}x{dim} matrix (norm {norm:e}, condition {condition:e})")]
    Eigensolver { dim: usize, norm: f64, condition: f64 },

    #[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("steady state did not converge after {} iterations (residual {:e})", .0.iterations, .0.residual)]
    SteadyStateNotConverged(Box<ClassicalSteadyState>),
}

impl Error {
    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
