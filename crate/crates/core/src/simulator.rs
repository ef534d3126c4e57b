//! Seeded Monte-Carlo execution of blind and smart search with plain
//! (non-)cooperative and stifler behaviours.
//!
//! Every replication owns a private ChaCha12 stream derived from
//! (master seed, instance, run), so results do not depend on execution
//! order and any single run can be reproduced in isolation. Within a run
//! all random draws happen in a fixed order: searchers ascending, then
//! activation decisions by node id, then stifling trials by node id.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::config::Behavior;
use crate::{Error, Result, SearchConfig};

/// Search variant: blind re-queries freely, smart only ever queries
/// never-before-queried nodes (pool snapshot taken at round start).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Blind,
    Smart,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Blind => "blind",
            Variant::Smart => "smart",
        }
    }
}

/// Whether a plain node that declined keeps re-deciding on later queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CooperationPersistence {
    /// Fresh Bernoulli trial every round the node is queried.
    #[default]
    Redecide,
    /// The first decision is permanent.
    DecideOnce,
}

/// Knobs that are not part of the model parameters proper.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct SimOptions {
    pub persistence: CooperationPersistence,
}

/// Outcome of a single search execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub rounds: u64,
    /// Nodes active once the discovery round has fully taken effect
    /// (activations from the final queries included, end-of-round
    /// stifling included).
    pub active_at_discovery: u32,
    /// Total query messages sent over the run.
    pub queries_sent: u64,
    pub instance: u32,
    pub run: u32,
    pub seed: u64,
}

/// Aggregated replication results; a pure function of (config, variant,
/// replication counts, master seed, options).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SearchConfig,
    pub variant: Variant,
    pub options: SimOptions,
    pub instances: u32,
    pub runs_per_instance: u32,
    pub master_seed: u64,
    pub rng_algorithm: String,
    pub mean_rounds: f64,
    pub stderr_rounds: f64,
    pub mean_active: f64,
    pub stderr_active: f64,
    pub mean_queries: f64,
    pub stderr_queries: f64,
    pub records: Vec<RunRecord>,
}

impl SimReport {
    pub fn replications(&self) -> u64 {
        self.instances as u64 * self.runs_per_instance as u64
    }

    /// Empirical first-success distribution over rounds 1..=max.
    pub fn rounds_distribution(&self) -> Vec<f64> {
        let max = self.records.iter().map(|r| r.rounds).max().unwrap_or(0) as usize;
        let mut hist = vec![0.0; max];
        for r in &self.records {
            hist[(r.rounds - 1) as usize] += 1.0;
        }
        let n = self.records.len() as f64;
        hist.iter_mut().for_each(|h| *h /= n);
        hist
    }
}

const RNG_ALGORITHM: &str = "chacha12";
const PLACEMENT_STREAM: u64 = u64::MAX;

/// splitmix64 finalizer; mixes the replication coordinates into the
/// master seed so streams are decorrelated and order-independent.
fn derive_seed(master: u64, instance: u64, run: u64) -> u64 {
    let mut z = master
        ^ instance.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ run.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws `amount` distinct values from 0..n in a deterministic order.
fn sample_distinct(rng: &mut ChaCha12Rng, n: u32, amount: u32) -> Vec<u32> {
    rand::seq::index::sample(rng, n as usize, amount as usize)
        .into_iter()
        .map(|i| i as u32)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeState {
    Inactive,
    Active,
    Stifler,
}

/// Executes one search run. Node 0 is the initiator; `file_placement`
/// holds the m file-holder ids (all nonzero).
pub fn simulate_search(
    config: &SearchConfig,
    variant: Variant,
    file_placement: &[u32],
    options: SimOptions,
    rng: &mut ChaCha12Rng,
) -> RunRecord {
    use rand::Rng;

    let n = config.num_nodes;
    let k = config.fanout;
    let behavior = config.behavior();
    let mut state = vec![NodeState::Inactive; n as usize];
    state[0] = NodeState::Active;
    let mut holds_file = vec![false; n as usize];
    for &f in file_placement {
        debug_assert!(f >= 1 && f < n);
        holds_file[f as usize] = true;
    }
    // Smart search: never-queried non-initiator nodes, ascending.
    let mut pool: Vec<u32> = (1..n).collect();
    // Plain decide-once refusals.
    let mut declined = vec![false; n as usize];
    let mut queried_this_round = vec![false; n as usize];

    let mut rounds = 0u64;
    let mut queries_sent = 0u64;
    loop {
        rounds += 1;
        debug_assert!(rounds < 100_000_000, "search failed to terminate");
        queried_this_round.iter_mut().for_each(|q| *q = false);
        let searchers: Vec<u32> = (0..n)
            .filter(|&i| state[i as usize] == NodeState::Active)
            .collect();
        let mut hit = false;
        for &searcher in &searchers {
            match variant {
                Variant::Blind => {
                    // k distinct picks among the other N-1 nodes.
                    for idx in sample_distinct(rng, n - 1, k) {
                        let target = if idx >= searcher { idx + 1 } else { idx };
                        queried_this_round[target as usize] = true;
                        queries_sent += 1;
                        if holds_file[target as usize] {
                            hit = true;
                        }
                    }
                }
                Variant::Smart => {
                    // Picks come from the round-start snapshot of the pool;
                    // simultaneous searchers may collide on a target.
                    let amount = k.min(pool.len() as u32);
                    for idx in sample_distinct(rng, pool.len() as u32, amount) {
                        let target = pool[idx as usize];
                        queried_this_round[target as usize] = true;
                        queries_sent += 1;
                        if holds_file[target as usize] {
                            hit = true;
                        }
                    }
                }
            }
        }
        // Queried nodes react, in node order. File holders answer queries
        // regardless; their activation follows the same behaviour rules.
        for node in 1..n {
            if !queried_this_round[node as usize] {
                continue;
            }
            match state[node as usize] {
                NodeState::Active => {}
                NodeState::Inactive | NodeState::Stifler => match behavior {
                    Behavior::Plain { cooperation } => {
                        if declined[node as usize] {
                            continue;
                        }
                        // One Bernoulli trial per round however many queries
                        // the node received.
                        if rng.gen_bool(cooperation) {
                            state[node as usize] = NodeState::Active;
                        } else if options.persistence == CooperationPersistence::DecideOnce {
                            declined[node as usize] = true;
                        }
                    }
                    Behavior::Stifler { .. } => {
                        // Queried inactive nodes and stiflers join; the
                        // end-of-round trial below decides whether they
                        // stay for the next round.
                        state[node as usize] = NodeState::Active;
                    }
                },
            }
        }
        if let Behavior::Stifler { stifling } = behavior {
            for node in 1..n {
                if state[node as usize] == NodeState::Active && rng.gen_bool(stifling) {
                    state[node as usize] = NodeState::Stifler;
                }
            }
        }
        if variant == Variant::Smart {
            pool.retain(|&node| !queried_this_round[node as usize]);
        }
        if hit {
            let active_at_discovery =
                (0..n).filter(|&i| state[i as usize] == NodeState::Active).count() as u32;
            return RunRecord {
                rounds,
                active_at_discovery,
                queries_sent,
                instance: 0,
                run: 0,
                seed: 0,
            };
        }
    }
}

/// Draws the m file positions for one instance from its own stream.
pub fn draw_placement(config: &SearchConfig, master_seed: u64, instance: u32) -> Vec<u32> {
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(
        master_seed,
        instance as u64,
        PLACEMENT_STREAM,
    ));
    let mut placement: Vec<u32> =
        sample_distinct(&mut rng, config.num_nodes - 1, config.copies)
            .into_iter()
            .map(|i| i + 1)
            .collect();
    placement.sort_unstable();
    placement
}

fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `instances` random file placements with `runs_per_instance`
/// independent executions each and aggregates the outcomes.
pub fn run_experiment(
    config: &SearchConfig,
    variant: Variant,
    instances: u32,
    runs_per_instance: u32,
    master_seed: u64,
    options: SimOptions,
) -> Result<SimReport> {
    let config = config.clone().validated()?;
    if instances < 1 || runs_per_instance < 1 {
        return Err(Error::Config(
            "need at least one instance and one run per instance".into(),
        ));
    }
    let mut records = Vec::with_capacity(instances as usize * runs_per_instance as usize);
    for instance in 0..instances {
        let placement = draw_placement(&config, master_seed, instance);
        for run in 0..runs_per_instance {
            let seed = derive_seed(master_seed, instance as u64, run as u64);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut record = simulate_search(&config, variant, &placement, options, &mut rng);
            record.instance = instance;
            record.run = run;
            record.seed = seed;
            records.push(record);
        }
    }
    let (mean_rounds, stderr_rounds) =
        mean_stderr(records.iter().map(|r| r.rounds as f64));
    let (mean_active, stderr_active) =
        mean_stderr(records.iter().map(|r| r.active_at_discovery as f64));
    let (mean_queries, stderr_queries) =
        mean_stderr(records.iter().map(|r| r.queries_sent as f64));
    Ok(SimReport {
        config,
        variant,
        options,
        instances,
        runs_per_instance,
        master_seed,
        rng_algorithm: RNG_ALGORITHM.to_string(),
        mean_rounds,
        stderr_rounds,
        mean_active,
        stderr_active,
        mean_queries,
        stderr_queries,
        records,
    })
}

/// Convenience wrapper with the replication protocol defaults (100x100).
pub fn run_default_experiment(
    config: &SearchConfig,
    variant: Variant,
    master_seed: u64,
) -> Result<SimReport> {
    run_experiment(config, variant, 100, 100, master_seed, SimOptions::default())
}
