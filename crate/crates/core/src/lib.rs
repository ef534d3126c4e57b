//! Gossip-based file search on a complete graph: analytic models,
//! exact Markov baselines and seeded Monte-Carlo simulation.
//!
//! An initiator node searches for a file held by `m` of the other `N-1`
//! nodes, querying `k` random neighbours per round; queried nodes join
//! the search depending on their behaviour profile. The crate provides
//! four routes to the round count and participation cost of a search:
//!
//! * [`analytic_blind`] — deterministic-trajectory approximation of blind
//!   search (plain cooperation or stiflers), cheap at very large N;
//! * [`analytic_smart`] — occupancy-based Markov chain for smart search,
//!   exact rational transition matrix plus a composed round model, and
//!   the exact find-by curve at full cooperation;
//! * [`exact_blind`] — exact Markov baseline for blind search at full
//!   cooperation, used for accuracy tables;
//! * [`simulator`] — reproducible Monte-Carlo execution of either variant
//!   under any profile.
//!
//! [`analysis`] layers accuracy tables, paired comparisons, scaling fits,
//! benchmarks and the CSV/manifest output machinery on top.

pub mod analysis;
pub mod analytic_blind;
pub mod analytic_smart;
pub mod config;
pub mod core_math;
pub mod error;
pub mod exact_blind;
pub mod simulator;

pub use config::{Behavior, SearchConfig};
pub use core_math::{ModelSource, RoundPmf, SearchMetrics};
pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
