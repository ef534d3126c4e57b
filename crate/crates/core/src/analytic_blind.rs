//! Deterministic-trajectory approximate model for blind search, covering
//! plain (non-)cooperative nodes and stiflers.
//!
//! The active-node count follows a one-step recursion obtained from the
//! rumour-spreading mean-field argument with a second-order expansion of the
//! miss probability. The recursion value A(r) is real; the model rounds it
//! to the nearest integer (ties away from zero) before using it as the
//! number of simultaneous searchers in round r.

use serde::{Deserialize, Serialize};

use crate::config::Behavior;
use crate::core_math::{
    blind_round_success, metrics_from_pmf, round_pmf, single_success_for, ModelSource, RoundPmf,
    SearchMetrics,
};
use crate::{Error, Result, SearchConfig};

/// Deterministic active-node sequence A(1), A(2), ... with its rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveTrajectory {
    /// Raw recursion values, starting at A(1) = 1.
    pub raw: Vec<f64>,
    /// Nearest-integer values actually used by the round model.
    pub rounded: Vec<u32>,
    pub behavior: Behavior,
}

/// Nearest integer, ties rounded up (all trajectory values are >= 1).
fn round_active(a: f64, num_nodes: u32) -> u32 {
    (a.round() as u32).clamp(1, num_nodes)
}

/// Infinite iterator over A(1), A(2), ... for the configured behaviour.
struct TrajectoryIter {
    num_nodes: f64,
    coop: f64,
    stifle: f64,
    exponent_coef: f64,
    stifler_mode: bool,
    current: f64,
}

impl TrajectoryIter {
    fn new(config: &SearchConfig) -> Self {
        let n = config.num_nodes as f64;
        let k = config.fanout as f64;
        let others = n - 1.0;
        // Second-order expansion of (1 - k/(N-1))^A in the exponent.
        let exponent_coef = k / others + k * k / (2.0 * others * others);
        TrajectoryIter {
            num_nodes: n,
            coop: config.cooperation,
            stifle: config.stifling,
            exponent_coef,
            stifler_mode: matches!(config.behavior(), Behavior::Stifler { .. }),
            current: 1.0,
        }
    }
}

impl Iterator for TrajectoryIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let a = self.current;
        let n = self.num_nodes;
        let miss = (-a * self.exponent_coef).exp();
        self.current = if self.stifler_mode {
            let keep = 1.0 - self.stifle;
            1.0 + (n - 1.0) * keep - (n - a) * keep * miss
        } else {
            let c = self.coop;
            n * c + a * (1.0 - c) - (n - a) * c * miss
        };
        Some(a)
    }
}

fn trajectory(config: &SearchConfig, rounds: usize, behavior: Behavior) -> ActiveTrajectory {
    let raw: Vec<f64> = TrajectoryIter::new(config).take(rounds).collect();
    let rounded = raw
        .iter()
        .map(|&a| round_active(a, config.num_nodes))
        .collect();
    ActiveTrajectory {
        raw,
        rounded,
        behavior,
    }
}

/// Trajectory of the plain (non-)cooperative recursion. Requires s = 0.
pub fn cooperative_trajectory(config: &SearchConfig, rounds: usize) -> Result<ActiveTrajectory> {
    let config = config.clone().validated()?;
    match config.behavior() {
        Behavior::Plain { cooperation } => Ok(trajectory(
            &config,
            rounds,
            Behavior::Plain { cooperation },
        )),
        Behavior::Stifler { .. } => Err(Error::Domain(
            "cooperative trajectory requires s = 0".into(),
        )),
    }
}

/// Trajectory of the stifler recursion. Stifling replaces cooperation, so
/// the configuration must have c = 1 (s = 0 reproduces the cooperative
/// trajectory bit for bit).
pub fn stifler_trajectory(config: &SearchConfig, rounds: usize) -> Result<ActiveTrajectory> {
    let config = config.clone().validated()?;
    if config.cooperation < 1.0 {
        return Err(Error::Domain("stifler trajectory requires c = 1".into()));
    }
    // Force the stifler recursion even at s = 0.
    let mut iter = TrajectoryIter::new(&config);
    iter.stifler_mode = true;
    let raw: Vec<f64> = iter.take(rounds).collect();
    let rounded = raw
        .iter()
        .map(|&a| round_active(a, config.num_nodes))
        .collect();
    Ok(ActiveTrajectory {
        raw,
        rounded,
        behavior: Behavior::Stifler {
            stifling: config.stifling,
        },
    })
}

/// Round distribution of the blind search under the configured behaviour.
pub fn blind_round_pmf(config: &SearchConfig) -> Result<RoundPmf> {
    let config = config.clone().validated()?;
    let p_s = single_success_for(&config)?;
    let n = config.num_nodes;
    let successes =
        TrajectoryIter::new(&config).map(move |a| blind_round_success(p_s, round_active(a, n)));
    round_pmf(successes, config.epsilon, config.round_cap)
}

/// Everything the blind model produces in one pass.
#[derive(Debug, Clone)]
pub struct BlindEvaluation {
    pub pmf: RoundPmf,
    pub metrics: SearchMetrics,
    /// Trajectory covering one round past the pmf support (the last entry
    /// weights the final pmf round).
    pub trajectory: ActiveTrajectory,
}

/// Composes the trajectory, pmf and summary metrics. `E[A]` weights round r
/// by the rounded active count of round r+1: those are the nodes involved
/// once round r's queries have taken effect.
pub fn blind_evaluation(config: &SearchConfig) -> Result<BlindEvaluation> {
    let config = config.clone().validated()?;
    let pmf = blind_round_pmf(&config)?;
    let traj = trajectory(&config, pmf.probs.len() + 1, config.behavior());
    let weights: Vec<f64> = traj.rounded[1..].iter().map(|&a| a as f64).collect();
    let metrics = metrics_from_pmf(&pmf, &weights, ModelSource::AnalyticBlind)?;
    Ok(BlindEvaluation {
        pmf,
        metrics,
        trajectory: traj,
    })
}

/// Mean rounds and mean active nodes of the blind model.
pub fn blind_metrics(config: &SearchConfig) -> Result<SearchMetrics> {
    Ok(blind_evaluation(config)?.metrics)
}
