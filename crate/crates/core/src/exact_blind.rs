//! Exact Markov model for blind search at full cooperation, used as the
//! accuracy baseline for the approximate model.
//!
//! The chain tracks the active-node count. With c = 1 the activation
//! dynamics do not depend on where the file sits, so the probability of
//! having found the file within r rounds weights the state distribution by
//! the chance that the queried set intersects the file placement. Rows are
//! built by inclusion-exclusion over the event that a given set of inactive
//! nodes receives no query, whose probability is
//! [C(N-1-t, k) / C(N-1, k)]^i for i independent k-subset draws.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analytic_smart::{TransitionMatrix, EXACT_SIZE_BUDGET};
use crate::core_math::{big_binomial, big_binomial_ratio, rational_to_f64, ModelSource, SearchMetrics};
use crate::{Error, Result, SearchConfig};

/// One transition row of the exact blind chain: the distribution of the
/// next active count when `active` nodes each query `fanout` distinct
/// neighbours of their N-1, repetitions across rounds allowed.
pub fn exact_blind_transition_row(
    active: u32,
    num_nodes: u32,
    fanout: u32,
) -> Result<Vec<BigRational>> {
    let (i, n, k) = (active as u64, num_nodes as u64, fanout as u64);
    if active < 1 || active > num_nodes {
        return Err(Error::Domain(format!(
            "active count {active} outside 1..={num_nodes}"
        )));
    }
    let mut row = vec![BigRational::zero(); num_nodes as usize];
    // Probability that one searcher's k-subset avoids a given set of x
    // complement-nodes is C(N-1-x, k)/C(N-1, k); precompute the i-th powers
    // indexed by the SIZE of the allowed pool, N-1-x.
    let mut avoid_pow = vec![BigRational::zero(); n as usize];
    for allowed in 0..n {
        avoid_pow[allowed as usize] =
            big_binomial_ratio(allowed, n - 1, k).pow(active as i32);
    }
    let inactive = n - i;
    let max_new = inactive.min(i * k);
    for newly in 0..=max_new {
        // Exactly this set of `newly` nodes is queried among the inactive:
        // subsets of the target set flip in and out of the avoided set.
        let mut sum = BigRational::zero();
        let mut sign = BigInt::one();
        for t in 0..=newly {
            let choose = big_binomial(newly, t);
            let pool = (i + newly - t - 1) as usize; // N-1 minus avoided count
            sum += BigRational::from_integer(&sign * choose) * &avoid_pow[pool];
            sign = -sign;
        }
        let entry = BigRational::from_integer(big_binomial(inactive, newly)) * sum;
        row[(i + newly - 1) as usize] = entry;
    }
    Ok(row)
}

/// Exact find-by probabilities B(1), B(2), ... up to truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindByCurve {
    /// values[r-1] = B(r); B(0) = 0 by convention.
    pub values: Vec<f64>,
}

impl FindByCurve {
    /// First-success pmf q(r) = B(r) - B(r-1).
    pub fn pmf(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.values
            .iter()
            .map(|&b| {
                let q = b - prev;
                prev = b;
                q
            })
            .collect()
    }
}

/// Exact model outputs produced in one chain walk.
#[derive(Debug, Clone)]
pub struct ExactEvaluation {
    pub curve: FindByCurve,
    pub metrics: SearchMetrics,
}

/// The exact blind chain for a full-cooperation configuration.
#[derive(Debug, Clone)]
pub struct ExactBlindModel {
    config: SearchConfig,
    pub matrix: TransitionMatrix,
    /// miss[i-1] = C(N-i, m)/C(N-1, m): the file avoids the i-state's
    /// queried set (zero binomial convention for N-i < m).
    miss: Vec<BigRational>,
}

impl ExactBlindModel {
    pub fn new(config: &SearchConfig) -> Result<Self> {
        let config = config.clone().validated()?;
        if config.cooperation < 1.0 || config.stifling > 0.0 {
            return Err(Error::Domain(
                "the exact blind model covers c = 1 without stiflers".into(),
            ));
        }
        let n = config.num_nodes;
        if n > EXACT_SIZE_BUDGET {
            return Err(Error::SizeBudget {
                n,
                budget: EXACT_SIZE_BUDGET,
            });
        }
        let mut rows = Vec::with_capacity(n as usize);
        for state in 1..=n {
            rows.push(exact_blind_transition_row(state, n, config.fanout)?);
        }
        let matrix = TransitionMatrix::from_rational_rows(rows);
        let total = big_binomial(n as u64 - 1, config.copies as u64);
        let miss = (1..=n)
            .map(|i| {
                BigRational::new(
                    big_binomial((n - i) as u64, config.copies as u64),
                    total.clone(),
                )
            })
            .collect();
        Ok(ExactBlindModel {
            config,
            matrix,
            miss,
        })
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    /// B(r) by exact rational propagation (r = 0 gives 0).
    pub fn find_by_rational(&self, rounds: u64) -> Result<BigRational> {
        let mut dist = self.initial_dist_rational();
        for _ in 0..rounds {
            dist = self.matrix.propagate_rational(&dist)?;
        }
        let hit: BigRational = dist
            .iter()
            .zip(&self.miss)
            .map(|(p, miss)| p * (BigRational::one() - miss))
            .sum();
        Ok(hit)
    }

    /// B(r) in float, propagating round by round.
    pub fn find_by(&self, rounds: u64) -> f64 {
        let miss: Vec<f64> = self.miss.iter().map(rational_to_f64).collect();
        let mut dist = self.initial_dist();
        for _ in 0..rounds {
            dist = self.matrix.propagate_f64(&dist);
        }
        dist.iter().zip(&miss).map(|(p, ms)| p * (1.0 - ms)).sum()
    }

    /// B(r) via Q^r computed by repeated squaring: the large-r path whose
    /// cost is dominated by O(ln r) dense matrix products.
    pub fn find_by_squaring(&self, rounds: u64) -> f64 {
        if rounds == 0 {
            return 0.0;
        }
        let power = self.matrix.power_f64_by_squaring(rounds);
        let miss: Vec<f64> = self.miss.iter().map(rational_to_f64).collect();
        power[0]
            .iter()
            .zip(&miss)
            .map(|(p, ms)| p * (1.0 - ms))
            .sum()
    }

    fn initial_dist(&self) -> Vec<f64> {
        let mut dist = vec![0.0; self.config.num_nodes as usize];
        dist[0] = 1.0;
        dist
    }

    fn initial_dist_rational(&self) -> Vec<BigRational> {
        let mut dist = vec![BigRational::zero(); self.config.num_nodes as usize];
        dist[0] = BigRational::one();
        dist
    }

    /// Exact first-success pmf q(1..=rounds) as rationals (desk-scale
    /// oracle-equivalence path; the chain and the file-hit weighting are
    /// both exact, only truncation is external).
    pub fn round_pmf_rational(&self, rounds: u64) -> Result<Vec<BigRational>> {
        let rows = self
            .matrix
            .rational_rows()
            .expect("exact blind matrix is rational");
        let mut dist = self.initial_dist_rational();
        let mut pmf = Vec::with_capacity(rounds as usize);
        for _ in 0..rounds {
            let mut q_r = BigRational::zero();
            let mut next = vec![BigRational::zero(); dist.len()];
            for (i, p) in dist.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                for (j, t) in rows[i].iter().enumerate() {
                    if t.is_zero() {
                        continue;
                    }
                    let w = p * t;
                    let found = &self.miss[i] - &self.miss[j];
                    if !found.is_zero() {
                        q_r += &w * &found;
                    }
                    next[j] += w;
                }
            }
            pmf.push(q_r);
            dist = next;
        }
        Ok(pmf)
    }

    /// Float walk of the chain: find-by curve, pmf-derived `E[r]` and the
    /// active count at the finding round, truncated once 1 - B(r) drops
    /// below epsilon.
    pub fn evaluate(&self) -> Result<ExactEvaluation> {
        let cfg = &self.config;
        let rows = self.matrix.float_rows();
        let miss: Vec<f64> = self.miss.iter().map(rational_to_f64).collect();
        let n = cfg.num_nodes as usize;
        let mut dist = self.initial_dist();
        let mut curve = Vec::new();
        let mut found_total = 0.0_f64;
        let mut mean_rounds = 0.0_f64;
        let mut mean_active = 0.0_f64;
        let mut round = 0u64;
        while 1.0 - found_total >= cfg.epsilon {
            round += 1;
            if round > cfg.round_cap {
                return Err(Error::Truncation {
                    cap: cfg.round_cap,
                    survival: 1.0 - found_total,
                    epsilon: cfg.epsilon,
                    partial: crate::core_math::RoundPmf {
                        probs: FindByCurve { values: curve }.pmf(),
                        residual: 1.0 - found_total,
                        r_max: cfg.round_cap,
                    },
                });
            }
            let mut q_r = 0.0;
            let mut a_r = 0.0;
            let mut next = vec![0.0; n];
            for (i, &p) in dist.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (j, &t) in rows[i].iter().enumerate() {
                    if t == 0.0 {
                        continue;
                    }
                    let w = p * t;
                    let found = miss[i] - miss[j];
                    if found != 0.0 {
                        q_r += w * found;
                        a_r += w * found * (j + 1) as f64;
                    }
                    next[j] += w;
                }
            }
            found_total += q_r;
            mean_rounds += round as f64 * q_r;
            mean_active += a_r;
            curve.push(found_total);
            dist = next;
        }
        Ok(ExactEvaluation {
            curve: FindByCurve { values: curve },
            metrics: SearchMetrics {
                mean_rounds,
                mean_active,
                source: ModelSource::ExactBlind,
            },
        })
    }

    pub fn metrics(&self) -> Result<SearchMetrics> {
        Ok(self.evaluate()?.metrics)
    }
}

/// Builds the exact model and returns its summary metrics.
pub fn exact_metrics(config: &SearchConfig) -> Result<SearchMetrics> {
    ExactBlindModel::new(config)?.metrics()
}

/// One exact-vs-approximate cell, reported the way the accuracy table
/// prints it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub exact: f64,
    pub approx: f64,
    /// (1 - |exact - approx| / exact) * 100, clamped to [0, 100] and
    /// rounded to two decimals.
    pub accuracy_pct: f64,
}

/// Relative accuracy of a single approximate value.
pub fn relative_accuracy_value(exact: f64, approx: f64) -> Result<AccuracyReport> {
    if exact == 0.0 {
        return Err(Error::UndefinedAccuracy);
    }
    let raw = (1.0 - (exact - approx).abs() / exact) * 100.0;
    let accuracy_pct = (raw.clamp(0.0, 100.0) * 100.0).round() / 100.0;
    Ok(AccuracyReport {
        exact,
        approx,
        accuracy_pct,
    })
}

/// Per-metric accuracy of an approximate metrics pair against an exact one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsAccuracy {
    pub rounds: AccuracyReport,
    pub active: AccuracyReport,
}

pub fn relative_accuracy(
    exact: &SearchMetrics,
    approx: &SearchMetrics,
) -> Result<MetricsAccuracy> {
    Ok(MetricsAccuracy {
        rounds: relative_accuracy_value(exact.mean_rounds, approx.mean_rounds)?,
        active: relative_accuracy_value(exact.mean_active, approx.mean_active)?,
    })
}
