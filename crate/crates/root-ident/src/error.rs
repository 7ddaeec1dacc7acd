use crate::montecarlo::ErrorEstimate;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its domain constraint.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Observations cannot all come from a single root under the bounded
    /// uniform noise model (spread exceeds the noise support width).
    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    /// Newton iteration hit a zero derivative.
    #[error("zero derivative at iterate {iteration} (x = {x})")]
    ZeroDerivative { iteration: usize, x: f64 },

    /// An iterate left the finite reals.
    #[error("divergent iterate {iteration} (x = {x})")]
    Divergence { iteration: usize, x: f64 },

    /// The bound formula takes the logarithm of a non-positive quantity.
    #[error("undefined logarithm: {0}")]
    UndefinedLogarithm(String),

    /// An empirical search ran out of budget; carries the best attempt.
    #[error(
        "search cap {cap} exhausted; best n = {best_n} with worst-case upper CI {}",
        best_estimate.ci_hi
    )]
    CapExhausted {
        cap: usize,
        best_n: usize,
        best_estimate: ErrorEstimate,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::InconsistentData(_) => "inconsistent-data",
            Error::ZeroDerivative { .. } => "zero-derivative",
            Error::Divergence { .. } => "divergence",
            Error::UndefinedLogarithm(_) => "undefined-logarithm",
            Error::CapExhausted { .. } => "not-found",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
