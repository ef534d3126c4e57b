//! Shared numerics: binomial-ratio evaluation, success probabilities,
//! round distributions and summary metrics used by all model modules.
//!
//! Binomial coefficients are never materialised as factorials. Ratios
//! C(a,k)/C(b,k) are evaluated as a product of k factors (a-j)/(b-j), which
//! stays in range for networks of 1e5 nodes and more. The exact modules use
//! big-integer binomials instead.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, SearchConfig};

/// C(a,k)/C(b,k) for a <= b, as a product of ratios. Returns 0 when a < k.
pub fn binomial_ratio(a: u64, b: u64, k: u64) -> f64 {
    debug_assert!(a <= b);
    if a < k {
        return 0.0;
    }
    if k > b {
        return 0.0;
    }
    let mut ratio = 1.0_f64;
    for j in 0..k {
        ratio *= (a - j) as f64 / (b - j) as f64;
    }
    ratio
}

/// Exact binomial coefficient C(n,k). Zero when k > n.
pub fn big_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut result = BigInt::one();
    for j in 0..k {
        result *= BigInt::from(n - j);
        result /= BigInt::from(j + 1);
    }
    result
}

/// C(a,k)/C(b,k) as an exact rational. Zero when a < k.
pub fn big_binomial_ratio(a: u64, b: u64, k: u64) -> BigRational {
    debug_assert!(a <= b);
    if a < k || k > b {
        return BigRational::zero();
    }
    let mut numer = BigInt::one();
    let mut denom = BigInt::one();
    for j in 0..k {
        numer *= BigInt::from(a - j);
        denom *= BigInt::from(b - j);
    }
    BigRational::new(numer, denom)
}

/// Rounds a big rational to the nearest f64 without overflowing through
/// the naive numerator/denominator conversion.
pub fn rational_to_f64(value: &BigRational) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    let negative = value.is_negative();
    let numer = value.numer().abs();
    let denom = value.denom().abs();
    // Bring each side below 2^96 separately, keeping track of the shifts.
    let shift_n = numer.bits().saturating_sub(96);
    let shift_d = denom.bits().saturating_sub(96);
    let nf = (numer >> shift_n).to_f64().unwrap_or(f64::MAX);
    let df = (denom >> shift_d).to_f64().unwrap_or(f64::MAX);
    let mut out = nf / df;
    let exp = shift_n as i64 - shift_d as i64;
    if exp != 0 {
        out *= 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32);
    }
    if negative {
        out = -out;
    }
    out
}

/// Probability that a single blind search of `fanout` distinct neighbours
/// hits at least one of the `copies` file holders among the N-1 others.
pub fn single_search_success(num_nodes: u32, fanout: u32, copies: u32) -> Result<f64> {
    conditional_search_success(num_nodes, 1, fanout, copies)
}

/// Success probability of one smart search given `active` nodes are already
/// active: the searcher draws `fanout` distinct nodes from the N-active
/// never-queried pool, which holds all `copies` file copies.
///
/// Reduces exactly to [`single_search_success`] at `active = 1`.
pub fn conditional_search_success(
    num_nodes: u32,
    active: u32,
    fanout: u32,
    copies: u32,
) -> Result<f64> {
    if active < 1 || active >= num_nodes {
        return Err(Error::Domain(format!(
            "active count v={active} must satisfy 1 <= v < N={num_nodes}"
        )));
    }
    let pool = (num_nodes - active) as u64;
    let (k, m) = (fanout as u64, copies as u64);
    if k < 1 || k > pool {
        return Err(Error::Domain(format!(
            "fanout k={k} must satisfy 1 <= k <= N-v = {pool}"
        )));
    }
    if m < 1 || m > pool {
        return Err(Error::Domain(format!(
            "copies m={m} must satisfy 1 <= m <= N-v = {pool}"
        )));
    }
    if m + k > pool {
        // The complement binomial C(pool-m, k) vanishes.
        return Ok(1.0);
    }
    Ok(1.0 - binomial_ratio(pool - m, pool, k))
}

/// Exact-rational counterpart of [`conditional_search_success`], with the
/// same domain contract.
pub fn conditional_search_success_big(
    num_nodes: u32,
    active: u32,
    fanout: u32,
    copies: u32,
) -> Result<BigRational> {
    let pool = (num_nodes.saturating_sub(active)) as u64;
    // Reuse the float-path validation.
    conditional_search_success(num_nodes, active, fanout, copies)?;
    let (k, m) = (fanout as u64, copies as u64);
    if m + k > pool {
        return Ok(BigRational::one());
    }
    Ok(BigRational::one() - big_binomial_ratio(pool - m, pool, k))
}

/// Truncated distribution of the round at which the file is first found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundPmf {
    /// probs[r-1] is the probability of first success at round r.
    pub probs: Vec<f64>,
    /// Mass beyond the truncation point.
    pub residual: f64,
    /// Last round included in the support.
    pub r_max: u64,
}

impl RoundPmf {
    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum::<f64>() + self.residual
    }

    pub fn mean_round(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }
}

/// Composes per-round success probabilities S(1), S(2), ... into the
/// first-success distribution p(r) = S(r) * prod_{i<r} (1 - S(i)).
///
/// Iteration stops at the first round whose preceding survival probability
/// drops below `epsilon`; the leftover survival is reported as residual.
/// If the survival has not dropped below `epsilon` after `round_cap` rounds
/// the partial pmf is returned inside [`Error::Truncation`].
pub fn round_pmf<I>(success_seq: I, epsilon: f64, round_cap: u64) -> Result<RoundPmf>
where
    I: IntoIterator<Item = f64>,
{
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon={epsilon} must lie in (0,1)")));
    }
    let mut probs = Vec::new();
    let mut survival = 1.0_f64;
    let mut round = 0u64;
    for s in success_seq {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!(
                "round success probability {s} outside [0,1]"
            )));
        }
        if survival < epsilon {
            break;
        }
        round += 1;
        if round > round_cap {
            return Err(Error::Truncation {
                cap: round_cap,
                survival,
                epsilon,
                partial: RoundPmf {
                    probs,
                    residual: survival,
                    r_max: round_cap,
                },
            });
        }
        probs.push(survival * s);
        survival *= 1.0 - s;
    }
    if survival >= epsilon {
        // Sequence ended while mass remained: the caller's generator is
        // responsible for providing rounds until truncation.
        return Err(Error::Truncation {
            cap: round_cap,
            survival,
            epsilon,
            partial: RoundPmf {
                probs,
                residual: survival,
                r_max: round,
            },
        });
    }
    Ok(RoundPmf {
        probs,
        residual: survival,
        r_max: round,
    })
}

/// Which route produced a set of summary metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelSource {
    AnalyticBlind,
    AnalyticSmart,
    ExactBlind,
    Simulation,
}

impl ModelSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelSource::AnalyticBlind => "analytic-blind",
            ModelSource::AnalyticSmart => "analytic-smart",
            ModelSource::ExactBlind => "exact-blind",
            ModelSource::Simulation => "simulation",
        }
    }
}

/// Mean rounds to discovery and mean nodes involved in the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchMetrics {
    pub mean_rounds: f64,
    pub mean_active: f64,
    pub source: ModelSource,
}

/// `E[r]` and `E[A]` over the truncated support.
///
/// `active_weights[r-1]` is the expected number of nodes active once round
/// r's queries have taken effect (the count of nodes involved if the file is
/// found at round r). The residual mass contributes nothing; its bias is
/// bounded by residual * r_max.
pub fn metrics_from_pmf(
    pmf: &RoundPmf,
    active_weights: &[f64],
    source: ModelSource,
) -> Result<SearchMetrics> {
    if active_weights.len() < pmf.probs.len() {
        return Err(Error::Mismatch(format!(
            "{} active weights for {} pmf rounds",
            active_weights.len(),
            pmf.probs.len()
        )));
    }
    let mean_rounds = pmf.mean_round();
    let mean_active = pmf
        .probs
        .iter()
        .zip(active_weights)
        .map(|(p, a)| p * a)
        .sum();
    Ok(SearchMetrics {
        mean_rounds,
        mean_active,
        source,
    })
}

/// Shorthand used by the model modules: success probability of one round
/// with `active` independent blind searchers.
pub fn blind_round_success(single_success: f64, active: u32) -> f64 {
    1.0 - (1.0 - single_success).powi(active as i32)
}

/// Validates a config and returns the single-search success probability.
pub fn single_success_for(config: &SearchConfig) -> Result<f64> {
    single_search_success(config.num_nodes, config.fanout, config.copies)
}
