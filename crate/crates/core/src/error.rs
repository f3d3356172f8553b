use thiserror::Error;

use crate::spectral::FieldRole;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("role mismatch: expected {expected:?} field, found {found:?}")]
    RoleMismatch { expected: FieldRole, found: FieldRole },

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("integration diverged at step {step} (t = {time})")]
    Diverged { step: usize, time: f64 },

    #[error("degenerate frame: vector {index} is linearly dependent on its predecessors")]
    DegenerateFrame { index: usize },

    #[error("frame is not alpha-orthonormal (Gram deviation {deviation:e})")]
    StaleFrame { deviation: f64 },

    #[error("bound requires d = {expected}, got d = {found}")]
    WrongDimension { expected: u8, found: u8 },

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("root finder failed on bracket [{lo:e}, {hi:e}]: {reason}")]
    RootNotFound { lo: f64, hi: f64, reason: String },

    #[error("malformed snapshot at line {line}: {reason}")]
    Snapshot { line: usize, reason: String },

    #[error("configuration error:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
