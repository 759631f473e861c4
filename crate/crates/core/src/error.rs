//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A field contains NaN or infinite values, or violates a structural
    /// invariant (Hermitian symmetry, size mismatch with its grid).
    #[error("invalid field: {0}")]
    InvalidField(String),

    /// A differential or algebraic operator was applied to an operand of the
    /// wrong shape.
    #[error("invalid operand: {0}")]
    InvalidOperand(String),

    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two fields that must share a grid do not.
    #[error("grid mismatch: {0} vs {1} points per axis")]
    GridMismatch(usize, usize),

    /// A dyadic shell index outside [-1, q_max] was requested.
    #[error("shell index {q} out of range (valid: -1..={q_max})")]
    ShellOutOfRange { q: i32, q_max: i32 },

    /// An operation's precondition (e.g. a divergence-free hypothesis) does
    /// not hold for the given input.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// A norm ratio was requested for a shell with no content.
    #[error("shell q={0} is empty")]
    EmptyShell(i32),

    /// The advective/Hall CFL constraint rejects the configured time step.
    #[error("CFL violation: dt={dt} exceeds the stable limit; suggested dt <= {suggested}")]
    CflError { dt: f64, suggested: f64 },

    /// The solution norm exceeded the blow-up threshold or became non-finite.
    #[error("blow-up detected at t={t}")]
    BlowupDetected { t: f64 },

    /// NaN appeared in the middle of a nonlinear evaluation.
    #[error("numerical fault: {0}")]
    NumericalFault(String),

    /// A run/sweep configuration file is malformed or violates a constraint.
    #[error("config error ({location}): {message}")]
    ConfigError { location: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ConfigError {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
