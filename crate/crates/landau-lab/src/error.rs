//! Crate-wide error type with an exit-code classification for the CLI.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LandauError>;

#[derive(Debug, Error)]
pub enum LandauError {
    #[error("unsupported dimension {0}, expected 1 or 2")]
    UnsupportedDim(usize),

    #[error("mode k = 0 is excluded here")]
    ZeroMode,

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Constraints(Vec<String>),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("re(lambda) = {re} lies left of the analyticity strip boundary {limit}")]
    OutsideStrip { re: f64, limit: f64 },

    #[error("resolvent denominator modulus {min:.3e} below floor {floor:.3e} on the contour re(lambda) = {re:.4}")]
    ContourDenominator { min: f64, floor: f64, re: f64 },

    #[error("contour truncation estimate {est:.3e} above tolerance {tol:.3e} at im(lambda) = {at:.1}")]
    ContourTruncation { est: f64, tol: f64, at: f64 },

    #[error("time/mode grids do not match: {0}")]
    GridMismatch(String),

    #[error("|eta| = {eta:.4} outside the tabulated profile radius {max:.4} and no analytic fallback exists")]
    EtaOutOfRange { eta: f64, max: f64 },

    #[error("seed violates neutrality: net charge {0:.3e}")]
    Neutrality(f64),

    #[error("gliding-frame aliasing for mode {mode}: edge-band level {level:.3e} of peak at t = {t:.3}")]
    Aliasing { mode: String, level: f64, t: f64 },

    #[error("velocity-boundary mass {mass:.3e} above tolerance {tol:.3e} at t = {t:.3}; enlarge v_max")]
    BoundaryMass { mass: f64, tol: f64, t: f64 },

    #[error("step sanity limit exceeded: {0}")]
    StepSanity(String),

    #[error("weight overflow for mode {mode} at t = {t}: log value {log_value:.3}")]
    WeightOverflow { mode: String, t: f64, log_value: f64 },

    #[error("decay fit needs at least {need} usable points, got {got}")]
    FitPoints { need: usize, got: usize },

    #[error("invariant breach: {0}")]
    Invariant(String),

    #[error("checkpoint format: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LandauError {
    /// Process exit code: 1 for usage/config/environment, 2 for a numerical breach.
    pub fn exit_code(&self) -> i32 {
        use LandauError::*;
        match self {
            UnsupportedDim(_) | Config(_) | Constraints(_) | Io(_) | Checkpoint(_) => 1,
            _ => 2,
        }
    }
}
