//! Combinatorial Markov model for smart search: generalized occupancy
//! distribution, round-transition matrix over active-node counts,
//! success-by-round and summary metrics.
//!
//! The occupancy distribution is an alternating (inclusion-exclusion) sum,
//! so it is evaluated in exact rational arithmetic by default; the float
//! path is an opt-in shortcut that fails loudly when cancellation produces
//! an out-of-range probability. Chain propagation over a rationally-built
//! matrix only adds and multiplies non-negative numbers, so the float state
//! vector is used for metrics at larger N; the fully rational propagation
//! is kept for the exact find-by curve at c = 1.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};

use crate::core_math::{
    big_binomial, binomial_ratio, metrics_from_pmf, rational_to_f64, round_pmf, ModelSource,
    RoundPmf, SearchMetrics,
};
use crate::{Error, Result, SearchConfig};

/// Largest network for which dense exact matrices are built.
pub const EXACT_SIZE_BUDGET: u32 = 200;

/// Arithmetic backing a transition matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    Rational,
    Float,
}

/// Probability that exactly `empty` of `bins` bins stay empty after
/// `groups` independent rounds of `group_size` balls thrown into distinct
/// bins. Exact rational arithmetic.
pub fn occupancy_exactly_empty(
    empty: u32,
    groups: u32,
    group_size: u32,
    bins: u32,
) -> Result<BigRational> {
    occupancy_check_domain(empty, groups, group_size, bins)?;
    let (v, r, k, n) = (empty as u64, groups, group_size as u64, bins as u64);
    // C(n,v) * sum_i (-1)^i C(n-v,i) C(n-v-i,k)^r   over   C(n,k)^r
    let mut numer = BigInt::zero();
    let mut sign = BigInt::one();
    for i in 0..=(n - k - v) {
        let ways = big_binomial(n - v, i) * big_binomial(n - v - i, k).pow(r);
        numer += &sign * ways;
        sign = -sign;
    }
    numer *= big_binomial(n, v);
    let denom = big_binomial(n, k).pow(r);
    Ok(BigRational::new(numer, denom))
}

/// Float-mode counterpart of [`occupancy_exactly_empty`]. The alternating
/// sum can cancel catastrophically; any out-of-range result is reported as
/// an instability so the caller can retry in rational mode.
pub fn occupancy_exactly_empty_f64(
    empty: u32,
    groups: u32,
    group_size: u32,
    bins: u32,
) -> Result<f64> {
    occupancy_check_domain(empty, groups, group_size, bins)?;
    let (v, r, k, n) = (empty as u64, groups as i32, group_size as u64, bins as u64);
    let mut sum = 0.0_f64;
    let mut sign = 1.0_f64;
    for i in 0..=(n - k - v) {
        // C(n-v,i) * [C(n-v-i,k)/C(n,k)]^r, with C(n-v,i) as a float product.
        let mut choose = 1.0_f64;
        for j in 0..i {
            choose *= (n - v - j) as f64 / (j + 1) as f64;
        }
        sum += sign * choose * binomial_ratio(n - v - i, n, k).powi(r);
        sign = -sign;
    }
    let mut choose_v = 1.0_f64;
    for j in 0..v {
        choose_v *= (n - j) as f64 / (j + 1) as f64;
    }
    let p = choose_v * sum;
    if !(0.0..=1.0 + 1e-9).contains(&p) {
        return Err(Error::Instability(format!(
            "occupancy p_{empty}({groups},{group_size},{bins}) = {p:e} out of range; retry in rational mode"
        )));
    }
    Ok(p.min(1.0))
}

fn occupancy_check_domain(empty: u32, groups: u32, group_size: u32, bins: u32) -> Result<()> {
    if bins <= group_size {
        return Err(Error::Domain(format!(
            "occupancy needs more bins than balls per group: n={bins}, k={group_size}"
        )));
    }
    if group_size == 0 {
        return Err(Error::Domain("group size must be positive".into()));
    }
    if groups == 0 {
        return Err(Error::Domain("need at least one group".into()));
    }
    if empty > bins - group_size {
        return Err(Error::Domain(format!(
            "empty-bin count v={empty} must satisfy 0 <= v <= n-k = {}",
            bins - group_size
        )));
    }
    Ok(())
}

/// One pre-mixing transition row of the smart chain: distribution of the
/// next active count when `active` nodes each query `fanout` distinct nodes
/// from the common never-queried pool (all queried nodes join, c = 1).
///
/// Entry j-1 of the returned vector is the probability of moving to j
/// active nodes. When the pool holds at most `fanout` nodes every searcher
/// queries the whole pool, so the row degenerates to state N.
pub fn smart_transition_row(active: u32, num_nodes: u32, fanout: u32) -> Result<Vec<BigRational>> {
    if active < 1 || active > num_nodes {
        return Err(Error::Domain(format!(
            "active count {active} outside 1..={num_nodes}"
        )));
    }
    let n = num_nodes;
    let mut row = vec![BigRational::zero(); n as usize];
    let pool = n - active;
    if pool == 0 {
        row[(n - 1) as usize] = BigRational::one();
        return Ok(row);
    }
    if pool <= fanout {
        // Clamped fanout: all remaining nodes are queried at once.
        row[(n - 1) as usize] = BigRational::one();
        return Ok(row);
    }
    let max_new = pool.min(active.saturating_mul(fanout));
    for newly in fanout..=max_new {
        let next = active + newly;
        let empty = n - next;
        row[(next - 1) as usize] = occupancy_exactly_empty(empty, active, fanout, pool)?;
    }
    Ok(row)
}

/// Thins a pre-mixing row by per-node cooperation: each newly queried node
/// joins independently with probability `cooperation`, so transitions that
/// queried d new nodes scatter binomially over 0..=d accepted ones.
pub fn cooperation_mixing(row: &[BigRational], active: u32, cooperation: f64) -> Vec<BigRational> {
    let c = BigRational::from_f64(cooperation).expect("cooperation probability is finite");
    let one_minus = BigRational::one() - &c;
    let mut mixed = vec![BigRational::zero(); row.len()];
    let base = (active - 1) as usize;
    for (idx, p) in row.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let d = idx - base; // newly queried nodes for this transition
        if d == 0 || cooperation == 1.0 {
            mixed[idx] += p;
            continue;
        }
        // Binomial(d, c) over the accepted count.
        let mut weight = one_minus.pow(d as i32); // alpha = 0 term
        let ratio = if cooperation == 0.0 {
            BigRational::zero()
        } else {
            &c / &one_minus
        };
        for alpha in 0..=d {
            if alpha > 0 {
                if cooperation == 0.0 {
                    break;
                }
                weight = if one_minus.is_zero() {
                    unreachable!("c = 1 handled above")
                } else {
                    weight * &ratio * BigRational::from_integer(BigInt::from(d - alpha + 1))
                        / BigRational::from_integer(BigInt::from(alpha))
                };
            }
            mixed[base + alpha] += p * &weight;
        }
    }
    mixed
}

/// Dense round-transition matrix over active-node counts 1..=N.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    order: u32,
    exactness: Exactness,
    rational_rows: Option<Vec<Vec<BigRational>>>,
    float_rows: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    /// Builds the smart-search matrix with cooperation mixing applied.
    pub fn build_smart(config: &SearchConfig, exactness: Exactness) -> Result<Self> {
        let config = config.clone().validated()?;
        let n = config.num_nodes;
        if n > EXACT_SIZE_BUDGET {
            return Err(Error::SizeBudget {
                n,
                budget: EXACT_SIZE_BUDGET,
            });
        }
        match exactness {
            Exactness::Rational => {
                let mut rows = Vec::with_capacity(n as usize);
                for state in 1..=n {
                    let pre = smart_transition_row(state, n, config.fanout)?;
                    rows.push(cooperation_mixing(&pre, state, config.cooperation));
                }
                let float_rows = rows
                    .iter()
                    .map(|row| row.iter().map(rational_to_f64).collect())
                    .collect();
                Ok(TransitionMatrix {
                    order: n,
                    exactness,
                    rational_rows: Some(rows),
                    float_rows,
                })
            }
            Exactness::Float => {
                let mut rows = Vec::with_capacity(n as usize);
                for state in 1..=n {
                    rows.push(smart_transition_row_f64(state, n, config.fanout)?);
                }
                let rows = rows
                    .iter()
                    .enumerate()
                    .map(|(i, row)| cooperation_mixing_f64(row, i as u32 + 1, config.cooperation))
                    .collect();
                Ok(TransitionMatrix {
                    order: n,
                    exactness,
                    rational_rows: None,
                    float_rows: rows,
                })
            }
        }
    }

    /// Wraps externally built rational rows (used by the exact blind model).
    pub fn from_rational_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let order = rows.len() as u32;
        let float_rows = rows
            .iter()
            .map(|row| row.iter().map(rational_to_f64).collect())
            .collect();
        TransitionMatrix {
            order,
            exactness: Exactness::Rational,
            rational_rows: Some(rows),
            float_rows,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn rational_rows(&self) -> Option<&[Vec<BigRational>]> {
        self.rational_rows.as_deref()
    }

    pub fn float_rows(&self) -> &[Vec<f64>] {
        &self.float_rows
    }

    /// dist <- dist * Q, in f64.
    pub fn propagate_f64(&self, dist: &[f64]) -> Vec<f64> {
        let n = self.order as usize;
        let mut next = vec![0.0; n];
        for (i, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (j, q) in self.float_rows[i].iter().enumerate() {
                if *q != 0.0 {
                    next[j] += p * q;
                }
            }
        }
        next
    }

    /// dist <- dist * Q, exactly.
    pub fn propagate_rational(&self, dist: &[BigRational]) -> Result<Vec<BigRational>> {
        let rows = self
            .rational_rows()
            .ok_or_else(|| Error::Instability("matrix has no rational backing".into()))?;
        let n = self.order as usize;
        let mut next = vec![BigRational::zero(); n];
        for (i, p) in dist.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (j, q) in rows[i].iter().enumerate() {
                if !q.is_zero() {
                    next[j] += p * q;
                }
            }
        }
        Ok(next)
    }

    /// Q^power by repeated squaring in f64 (the bench path).
    pub fn power_f64_by_squaring(&self, power: u64) -> Vec<Vec<f64>> {
        let n = self.order as usize;
        let mut result: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let mut base = self.float_rows.clone();
        let mut exp = power;
        while exp > 0 {
            if exp & 1 == 1 {
                result = mat_mul(&result, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = mat_mul(&base, &base);
            }
        }
        result
    }
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for l in 0..n {
            let alv = a[i][l];
            if alv == 0.0 {
                continue;
            }
            let (out_i, b_l) = (&mut out[i], &b[l]);
            for j in 0..n {
                out_i[j] += alv * b_l[j];
            }
        }
    }
    out
}

fn smart_transition_row_f64(active: u32, num_nodes: u32, fanout: u32) -> Result<Vec<f64>> {
    let n = num_nodes;
    let mut row = vec![0.0; n as usize];
    let pool = n - active;
    if pool <= fanout {
        row[(n - 1) as usize] = 1.0;
        return Ok(row);
    }
    let max_new = pool.min(active.saturating_mul(fanout));
    for newly in fanout..=max_new {
        let next = active + newly;
        row[(next - 1) as usize] = occupancy_exactly_empty_f64(n - next, active, fanout, pool)?;
    }
    Ok(row)
}

fn cooperation_mixing_f64(row: &[f64], active: u32, cooperation: f64) -> Vec<f64> {
    let mut mixed = vec![0.0; row.len()];
    let base = (active - 1) as usize;
    for (idx, &p) in row.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let d = idx - base;
        if d == 0 || cooperation == 1.0 {
            mixed[idx] += p;
            continue;
        }
        for alpha in 0..=d {
            let mut choose = 1.0;
            for j in 0..alpha {
                choose *= (d - j) as f64 / (j + 1) as f64;
            }
            let weight = choose
                * cooperation.powi(alpha as i32)
                * (1.0 - cooperation).powi((d - alpha) as i32);
            mixed[base + alpha] += p * weight;
        }
    }
    mixed
}

/// p_s(v): success probability of one smart searcher given v active nodes.
/// Out-of-domain corners are clamped: with fewer unqueried candidates than
/// the fanout every remaining node is queried, and once the copies cannot
/// all avoid the pool the search succeeds surely.
pub fn smart_single_success(num_nodes: u32, active: u32, fanout: u32, copies: u32) -> f64 {
    let pool = num_nodes.saturating_sub(active) as u64;
    let (m, k) = (copies as u64, fanout as u64);
    if m > pool {
        return 1.0;
    }
    let k = k.min(pool);
    1.0 - binomial_ratio(pool - m, pool, k)
}

/// Smart model bound on the number of rounds at c = 1.
pub fn smart_round_bound(num_nodes: u32, fanout: u32) -> u64 {
    (num_nodes as u64 - 1).div_ceil(fanout as u64)
}

/// The smart chain plus the derived per-round machinery.
#[derive(Debug, Clone)]
pub struct SmartChain {
    config: SearchConfig,
    pub matrix: TransitionMatrix,
}

/// Composed-model output: pmf, metrics and per-round mean active counts.
#[derive(Debug, Clone)]
pub struct SmartEvaluation {
    pub pmf: RoundPmf,
    pub metrics: SearchMetrics,
    /// `E[alpha(r)]` for each pmf round.
    pub mean_active_by_round: Vec<f64>,
}

impl SmartChain {
    pub fn new(config: &SearchConfig) -> Result<Self> {
        Self::with_exactness(config, Exactness::Rational)
    }

    pub fn with_exactness(config: &SearchConfig, exactness: Exactness) -> Result<Self> {
        let config = config.clone().validated()?;
        let matrix = TransitionMatrix::build_smart(&config, exactness)?;
        Ok(SmartChain { config, matrix })
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    fn success_terms(&self) -> Vec<f64> {
        let cfg = &self.config;
        (1..=cfg.num_nodes)
            .map(|v| {
                let p = smart_single_success(cfg.num_nodes, v, cfg.fanout, cfg.copies);
                1.0 - (1.0 - p).powi(v as i32)
            })
            .collect()
    }

    /// Per-round success probability S(r): the chance that at least one of
    /// the searchers active after r-1 rounds hits a copy, mixing the
    /// unconditional state distribution with the conditional batch success.
    pub fn success_by_round(&self, round: u64) -> Result<f64> {
        if round < 1 {
            return Err(Error::Domain("rounds start at 1".into()));
        }
        let terms = self.success_terms();
        let mut dist = self.initial_dist();
        for _ in 1..round {
            dist = self.matrix.propagate_f64(&dist);
        }
        Ok(dot_clamped(&dist, &terms))
    }

    fn initial_dist(&self) -> Vec<f64> {
        let mut dist = vec![0.0; self.config.num_nodes as usize];
        dist[0] = 1.0;
        dist
    }

    /// Composed model: pmf from the independence approximation plus the
    /// mean-active weights from the chain state.
    pub fn evaluate(&self) -> Result<SmartEvaluation> {
        let cfg = &self.config;
        let terms = self.success_terms();
        let mut dist = self.initial_dist();
        let mut successes = Vec::new();
        let mut weights = Vec::new();
        let mut survival = 1.0_f64;
        let mut rounds = 0u64;
        while survival >= cfg.epsilon {
            rounds += 1;
            if rounds > cfg.round_cap {
                break; // round_pmf reports the truncation failure
            }
            let s = dot_clamped(&dist, &terms);
            successes.push(s);
            survival *= 1.0 - s;
            dist = self.matrix.propagate_f64(&dist);
            weights.push(
                dist.iter()
                    .enumerate()
                    .map(|(j, p)| (j + 1) as f64 * p)
                    .sum(),
            );
        }
        let pmf = round_pmf(successes.iter().copied(), cfg.epsilon, cfg.round_cap)?;
        let metrics = metrics_from_pmf(&pmf, &weights, ModelSource::AnalyticSmart)?;
        Ok(SmartEvaluation {
            pmf,
            metrics,
            mean_active_by_round: weights,
        })
    }

    fn require_full_cooperation(&self) -> Result<()> {
        if self.config.cooperation < 1.0 || self.config.stifling > 0.0 {
            return Err(Error::Domain(
                "the exact find-by curve is defined for c = 1 without stiflers".into(),
            ));
        }
        Ok(())
    }

    fn hit_weights(&self) -> Vec<BigRational> {
        let cfg = &self.config;
        let n = cfg.num_nodes as u64;
        let m = cfg.copies as u64;
        let total = big_binomial(n - 1, m);
        (1..=cfg.num_nodes)
            .map(|v| {
                BigRational::one()
                    - BigRational::new(big_binomial(n - v as u64, m), total.clone())
            })
            .collect()
    }

    /// Exact probability that the file is found within `round` rounds
    /// (c = 1): the chain state is exact and the file placement is
    /// independent of it, so weighting states by the hit probability of
    /// their queried set gives the true find-by curve.
    pub fn exact_find_by(&self, round: u64) -> Result<BigRational> {
        self.require_full_cooperation()?;
        let hits = self.hit_weights();
        let mut dist = self.initial_dist_rational();
        for _ in 0..round {
            dist = self.matrix.propagate_rational(&dist)?;
        }
        Ok(dist
            .iter()
            .zip(&hits)
            .map(|(p, h)| p * h)
            .sum::<BigRational>())
    }

    fn initial_dist_rational(&self) -> Vec<BigRational> {
        let mut dist = vec![BigRational::zero(); self.config.num_nodes as usize];
        dist[0] = BigRational::one();
        dist
    }

    /// Exact first-success distribution at c = 1, indexed from round 1.
    pub fn exact_round_pmf(&self) -> Result<Vec<BigRational>> {
        Ok(self.exact_rational_run()?.0)
    }

    /// Exact `E[r]` and `E[A]` at c = 1 as rationals.
    pub fn exact_metrics_rational(&self) -> Result<(BigRational, BigRational)> {
        let (pmf, active) = self.exact_rational_run()?;
        let mean_rounds = pmf
            .iter()
            .enumerate()
            .map(|(i, q)| q * BigRational::from_integer(BigInt::from(i + 1)))
            .sum();
        Ok((mean_rounds, active))
    }

    pub fn exact_metrics(&self) -> Result<SearchMetrics> {
        let (rounds, active) = self.exact_metrics_rational()?;
        Ok(SearchMetrics {
            mean_rounds: rational_to_f64(&rounds),
            mean_active: rational_to_f64(&active),
            source: ModelSource::AnalyticSmart,
        })
    }

    /// Walks the exact chain until absorption, accumulating the first-find
    /// pmf and the expected active count at the finding round.
    fn exact_rational_run(&self) -> Result<(Vec<BigRational>, BigRational)> {
        self.require_full_cooperation()?;
        let rows = self
            .matrix
            .rational_rows()
            .ok_or_else(|| Error::Instability("exact curve needs a rational matrix".into()))?;
        let n = self.config.num_nodes as usize;
        let miss: Vec<BigRational> = self
            .hit_weights()
            .into_iter()
            .map(|h| BigRational::one() - h)
            .collect();
        let mut dist = self.initial_dist_rational();
        let mut pmf = Vec::new();
        let mut mean_active = BigRational::zero();
        let cap = smart_round_bound(self.config.num_nodes, self.config.fanout) + 1;
        for _round in 0..cap {
            if dist[n - 1].is_one() {
                break;
            }
            let mut q_r = BigRational::zero();
            let mut a_r = BigRational::zero();
            let mut next = vec![BigRational::zero(); n];
            for (i, p) in dist.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                for (j, t) in rows[i].iter().enumerate() {
                    if t.is_zero() {
                        continue;
                    }
                    let w = p * t;
                    let found = &miss[i] - &miss[j];
                    if !found.is_zero() {
                        q_r += &w * &found;
                        a_r += &w * &found * BigRational::from_integer(BigInt::from(j + 1));
                    }
                    next[j] += w;
                }
            }
            pmf.push(q_r);
            mean_active += a_r;
            dist = next;
        }
        // Normalise the conditional mean: found-at weights already sum to 1.
        Ok((pmf, mean_active))
    }
}

fn dot_clamped(dist: &[f64], terms: &[f64]) -> f64 {
    dist.iter()
        .zip(terms)
        .map(|(p, t)| p * t)
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Builds the chain and returns the composed-model metrics.
pub fn smart_metrics(config: &SearchConfig) -> Result<SearchMetrics> {
    Ok(SmartChain::new(config)?.evaluate()?.metrics)
}
