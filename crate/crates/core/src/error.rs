use thiserror::Error;

use crate::core_math::RoundPmf;

/// Errors shared by the model and analysis modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Parameters violate the configuration contract (N, k, m, c, s, epsilon).
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A single operation was called outside its parameter domain.
    #[error("parameter out of domain: {0}")]
    Domain(String),
    /// The survival product never dropped below epsilon within the round cap.
    /// Carries the pmf accumulated so far.
    #[error("round pmf not truncated within {cap} rounds (survival {survival:.3e}, epsilon {epsilon:.3e})")]
    Truncation {
        cap: u64,
        survival: f64,
        epsilon: f64,
        partial: RoundPmf,
    },
    /// A float-mode alternating sum produced an out-of-range probability.
    #[error("numerical instability: {0}")]
    Instability(String),
    /// Exact-arithmetic matrix requested for a network above the budget.
    #[error("network size {n} exceeds the exact-arithmetic budget {budget}; use the approximate model or simulation")]
    SizeBudget { n: u32, budget: u32 },
    /// Sequences passed to a metric computation do not line up.
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    /// Relative accuracy against an exact value of zero.
    #[error("relative accuracy undefined: exact value is zero")]
    UndefinedAccuracy,
    /// Least-squares fit could not be computed.
    #[error("fit failed: {0}")]
    Fit(String),
}

impl Error {
    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Mismatch(_) => 2,
            Error::Truncation { .. } | Error::Instability(_) => 3,
            Error::SizeBudget { .. } => 4,
            Error::UndefinedAccuracy | Error::Fit(_) => 2,
        }
    }
}
