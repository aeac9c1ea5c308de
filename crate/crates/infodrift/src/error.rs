//! Crate-wide error type.
//!
//! The variants mirror the failure taxonomy used throughout: parameter
//! errors (rejected inputs), quadrature failures carrying the best estimate,
//! drift singularities and inconsistent path states (which abort a single
//! Monte Carlo path), and wealth admissibility violations.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Adaptive quadrature ran out of budget. The best estimate and its
    /// error bound are preserved rather than silently returned as a value.
    #[error("quadrature did not converge: best estimate {estimate} with error bound {error_bound} after {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        error_bound: f64,
        evaluations: u64,
    },

    #[error("drift singularity at t = {t}: {detail}")]
    Singularity { t: f64, detail: String },

    #[error("inconsistent path state at t = {t}: {detail}")]
    InconsistentState { t: f64, detail: String },

    /// The discrete wealth factor `1 + π (S_{i+1}/S_i - 1)` dropped to zero
    /// or below; the wealth process must stay strictly positive.
    #[error("admissibility violation at step {step}: wealth factor {factor}")]
    Admissibility { step: usize, factor: f64 },

    /// Too many paths violated the positivity constraint for the estimate
    /// to be trusted: a statistical failure, not a parameter error.
    #[error("admissibility violation rate {violations}/{n_paths} exceeds the 0.1% gate")]
    ViolationRate { violations: u64, n_paths: u64 },

    #[error("unknown verification case `{0}`")]
    UnknownCase(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
