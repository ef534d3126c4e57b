use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default truncation threshold for round distributions.
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Default safety bound on the number of rounds evaluated.
pub const DEFAULT_ROUND_CAP: u64 = 1_000_000;

/// Node behaviour driving a model evaluation or simulation run.
///
/// Plain nodes decide whether to join the search with probability `c` each
/// time they are queried and never leave once active. Stiflers always join
/// when queried but may drop out of the search at the end of every round
/// with probability `s` (the initiator never drops out).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Behavior {
    Plain { cooperation: f64 },
    Stifler { stifling: f64 },
}

/// Full parameter tuple governing one model evaluation or experiment.
///
/// `num_nodes` counts the initiator, so there are `num_nodes - 1` candidate
/// file holders and query targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Total number of nodes N, including the initiator.
    pub num_nodes: u32,
    /// Neighbours queried per active node per round (k).
    pub fanout: u32,
    /// Copies of the file in the network (m).
    pub copies: u32,
    /// Cooperation probability c for plain nodes.
    pub cooperation: f64,
    /// Stifling probability s; nonzero only in stifler runs (which fix c = 1).
    pub stifling: f64,
    /// Truncation threshold for round distributions.
    pub epsilon: f64,
    /// Safety bound on the number of rounds evaluated.
    pub round_cap: u64,
}

impl SearchConfig {
    /// Fully cooperative or plain non-cooperative setting (s = 0).
    pub fn plain(num_nodes: u32, fanout: u32, copies: u32, cooperation: f64) -> Result<Self> {
        Self {
            num_nodes,
            fanout,
            copies,
            cooperation,
            stifling: 0.0,
            epsilon: DEFAULT_EPSILON,
            round_cap: DEFAULT_ROUND_CAP,
        }
        .validated()
    }

    /// Stifler setting: queried nodes always join (c = 1) but active
    /// non-initiators drop out with probability `stifling` each round.
    pub fn stifler(num_nodes: u32, fanout: u32, copies: u32, stifling: f64) -> Result<Self> {
        Self {
            num_nodes,
            fanout,
            copies,
            cooperation: 1.0,
            stifling,
            epsilon: DEFAULT_EPSILON,
            round_cap: DEFAULT_ROUND_CAP,
        }
        .validated()
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validated()
    }

    pub fn with_round_cap(mut self, round_cap: u64) -> Result<Self> {
        self.round_cap = round_cap;
        self.validated()
    }

    /// Checks every invariant of the parameter tuple.
    pub fn validated(self) -> Result<Self> {
        if self.num_nodes < 2 {
            return Err(Error::Config(format!(
                "need at least 2 nodes, got N={}",
                self.num_nodes
            )));
        }
        let others = self.num_nodes - 1;
        if self.fanout < 1 || self.fanout > others {
            return Err(Error::Config(format!(
                "fanout k={} must satisfy 1 <= k <= N-1 = {}",
                self.fanout, others
            )));
        }
        if self.copies < 1 || self.copies > others {
            return Err(Error::Config(format!(
                "copies m={} must satisfy 1 <= m <= N-1 = {}",
                self.copies, others
            )));
        }
        if !(0.0..=1.0).contains(&self.cooperation) {
            return Err(Error::Config(format!(
                "cooperation c={} must lie in [0,1]",
                self.cooperation
            )));
        }
        if !(0.0..=1.0).contains(&self.stifling) {
            return Err(Error::Config(format!(
                "stifling s={} must lie in [0,1]",
                self.stifling
            )));
        }
        if self.stifling > 0.0 && self.cooperation < 1.0 {
            return Err(Error::Config(
                "stifler runs replace the cooperation mechanism: c must be 1 when s > 0".into(),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!(
                "epsilon={} must lie in (0,1)",
                self.epsilon
            )));
        }
        if self.round_cap == 0 {
            return Err(Error::Config("round_cap must be positive".into()));
        }
        Ok(self)
    }

    /// Which behaviour drives this configuration.
    pub fn behavior(&self) -> Behavior {
        if self.stifling > 0.0 {
            Behavior::Stifler {
                stifling: self.stifling,
            }
        } else {
            Behavior::Plain {
                cooperation: self.cooperation,
            }
        }
    }
}
