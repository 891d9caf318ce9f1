//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by model construction, solving, and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A coupling, channel, port, or force target references a mode that
    /// does not exist in the system.
    #[error("unknown mode reference: {0}")]
    UnknownMode(String),

    /// Two modes (hence two ports) share the same name.
    #[error("duplicate mode/port name: {0}")]
    DuplicatePort(String),

    /// The force target must be a mechanical mode.
    #[error("force target `{0}` is not a mechanical mode")]
    NonMechanicalForceTarget(String),

    /// Model constraint violated (bad rate, sign, coupling kind, ...).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A reservoir mode slated for elimination carries an optomechanical
    /// coupling, or its damping vanishes.
    #[error("cannot eliminate reservoir mode `{0}`: {1}")]
    Elimination(String, String),

    /// Frequency grid constraint violated.
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    /// The resolvent (-iΩ - A) was singular at a grid point.
    #[error("numerical failure: singular system at omega = {omega}")]
    SingularAt { omega: f64 },

    /// The homodyne projection is orthogonal to the force response.
    #[error("signal power vanished at omega = {omega}: homodyne orthogonal to the force response")]
    ZeroSignalPower { omega: f64 },

    /// Closed-form feed-forward requested for a plan it does not cover.
    #[error("closed-form feed-forward is only defined for the canonical speed-meter plan: {0}")]
    ClosedFormPlan(String),

    /// Configuration error (field path + message). CLI exit code 2.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for configuration/model errors, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SingularAt { .. } | Error::ZeroSignalPower { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
