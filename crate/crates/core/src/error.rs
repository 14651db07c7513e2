use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid level index {0}: levels are numbered from 1")]
    InvalidLevel(usize),

    #[error("invalid carrier index {0}: carriers exist only for levels >= 2")]
    InvalidCarrier(usize),

    #[error("invalid well: {0}")]
    InvalidWell(String),

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("mode {mode} has zero coupling to the ground state but target amplitude {amplitude:e}")]
    SymmetryViolation { mode: usize, amplitude: f64 },

    #[error("control horizon must be positive, got {0}")]
    NonpositiveHorizon(f64),

    #[error("total field energy must be positive, got {0}")]
    ZeroEnergy(f64),

    #[error("target has no drivable excited-state amplitude")]
    EmptyTarget,

    #[error("invalid mode {0}: zero coupling or zero target amplitude")]
    InvalidMode(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("wavefunction norm {0} deviates from 1 by more than 1e-6")]
    Normalization(f64),

    #[error("truncation residual still {residual:e} at the cap of {cap} levels")]
    TruncationFailure { residual: f64, cap: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("integration failed at t = {time}: {reason}")]
    IntegrationFailure { time: f64, reason: String },

    #[error("mismatched sampling: {0}")]
    Sampling(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Image { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::IntegrationFailure { .. }
                | Error::Quadrature(_)
                | Error::Evaluation(_)
                | Error::TruncationFailure { .. }
                | Error::Normalization(_)
        )
    }
}
