use thiserror::Error;

/// Failures reported by the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular matrix at row {row}")]
    SingularMatrix { row: usize },

    #[error("series did not converge after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("step size underflow at r = {r:e} (h = {h:e}); problem too stiff for the explicit stepper")]
    StepUnderflow { r: f64, h: f64 },

    #[error("no positive decaying solution for d = {d}, omega = {omega}: {reason}")]
    NoSolution { d: u32, omega: f64, reason: String },

    #[error("no bracket for d = {d}: {detail}")]
    NoBracket { d: u32, detail: String },

    #[error("Green function normalization failed: {0}")]
    Normalization(String),

    #[error("inner expansion invalid: {0}")]
    ExpansionInvalid(String),

    #[error("decay not certified: {0}")]
    DecayNotCertified(String),

    #[error("unconverged result: {0}")]
    Unconverged(String),

    #[error("dimension {d} outside supported range: {detail}")]
    Dimension { d: u32, detail: String },

    #[error("Green data required for d = {d}")]
    MissingGreen { d: u32 },

    #[error("negative-eigenvalue count did not stabilize for d = {d}: {trace}")]
    NonStabilizing { d: u32, trace: String },
}

pub type Result<T> = std::result::Result<T, Error>;
