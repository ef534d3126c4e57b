//! Paired model comparisons with a shared master seed, reporting relative
//! changes the way the trade-off discussion quotes them.

use serde::{Deserialize, Serialize};

use crate::analytic_blind::blind_metrics;
use crate::analytic_smart::smart_metrics;
use crate::simulator::{run_experiment, SimOptions, SimReport, Variant};
use crate::{Error, Result, SearchConfig};

/// The comparisons quoted in the trade-off discussion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComparisonPair {
    /// m: 1 -> 3, blind, everything else fixed.
    CopiesOneToThree,
    /// k: 1 -> 3, blind.
    FanoutOneToThree,
    /// Smart vs blind at the configured cooperation.
    SmartVsBlind,
    /// Stifler s vs plain c = 1 - s (dual parameters), blind.
    StiflerVsDualPlain,
    /// Smart vs blind, both with stiflers at the configured s.
    SmartStiflerVsBlindStifler,
}

impl ComparisonPair {
    pub fn as_str(&self) -> &'static str {
        match self {
            ComparisonPair::CopiesOneToThree => "copies-1-to-3",
            ComparisonPair::FanoutOneToThree => "fanout-1-to-3",
            ComparisonPair::SmartVsBlind => "smart-vs-blind",
            ComparisonPair::StiflerVsDualPlain => "stifler-vs-dual-plain",
            ComparisonPair::SmartStiflerVsBlindStifler => "smart-stifler-vs-blind-stifler",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsTriple {
    pub mean_rounds: f64,
    pub mean_active: f64,
    pub mean_queries: f64,
}

impl From<&SimReport> for MetricsTriple {
    fn from(report: &SimReport) -> Self {
        MetricsTriple {
            mean_rounds: report.mean_rounds,
            mean_active: report.mean_active,
            mean_queries: report.mean_queries,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub pair: ComparisonPair,
    /// simulation (default) or analytic
    pub source: String,
    pub baseline: MetricsTriple,
    pub variant: MetricsTriple,
    pub pct_rounds: f64,
    pub pct_active: f64,
    pub pct_queries: f64,
}

fn pct(base: f64, var: f64) -> f64 {
    (var - base) / base * 100.0
}

fn row(
    pair: ComparisonPair,
    source: &str,
    baseline: MetricsTriple,
    variant: MetricsTriple,
) -> ComparisonRow {
    ComparisonRow {
        pair,
        source: source.to_string(),
        pct_rounds: pct(baseline.mean_rounds, variant.mean_rounds),
        pct_active: pct(baseline.mean_active, variant.mean_active),
        pct_queries: if baseline.mean_queries > 0.0 {
            pct(baseline.mean_queries, variant.mean_queries)
        } else {
            0.0
        },
        baseline,
        variant,
    }
}

/// Resolves the (baseline config+variant, variant config+variant) pair.
fn resolve(
    config: &SearchConfig,
    pair: ComparisonPair,
) -> Result<((SearchConfig, Variant), (SearchConfig, Variant))> {
    let cfg = config.clone().validated()?;
    match pair {
        ComparisonPair::CopiesOneToThree => {
            if cfg.copies != 1 {
                return Err(Error::Mismatch(
                    "copies comparison starts from m = 1".into(),
                ));
            }
            let mut variant = cfg.clone();
            variant.copies = 3;
            Ok(((cfg, Variant::Blind), (variant.validated()?, Variant::Blind)))
        }
        ComparisonPair::FanoutOneToThree => {
            if cfg.fanout != 1 {
                return Err(Error::Mismatch(
                    "fanout comparison starts from k = 1".into(),
                ));
            }
            let mut variant = cfg.clone();
            variant.fanout = 3;
            Ok(((cfg, Variant::Blind), (variant.validated()?, Variant::Blind)))
        }
        ComparisonPair::SmartVsBlind => {
            Ok(((cfg.clone(), Variant::Blind), (cfg, Variant::Smart)))
        }
        ComparisonPair::StiflerVsDualPlain => {
            if cfg.stifling <= 0.0 {
                return Err(Error::Mismatch(
                    "dual comparison needs a stifler configuration (s > 0)".into(),
                ));
            }
            let plain = SearchConfig::plain(
                cfg.num_nodes,
                cfg.fanout,
                cfg.copies,
                1.0 - cfg.stifling,
            )?
            .with_epsilon(cfg.epsilon)?;
            Ok(((plain, Variant::Blind), (cfg, Variant::Blind)))
        }
        ComparisonPair::SmartStiflerVsBlindStifler => {
            if cfg.stifling <= 0.0 {
                return Err(Error::Mismatch(
                    "stifler comparison needs s > 0".into(),
                ));
            }
            Ok(((cfg.clone(), Variant::Blind), (cfg, Variant::Smart)))
        }
    }
}

/// Runs both sides of the comparison as seeded experiments (same master
/// seed) and reports the relative change per metric.
pub fn compare_models(
    config: &SearchConfig,
    pair: ComparisonPair,
    instances: u32,
    runs_per_instance: u32,
    master_seed: u64,
) -> Result<ComparisonRow> {
    let ((base_cfg, base_var), (var_cfg, var_var)) = resolve(config, pair)?;
    let options = SimOptions::default();
    let base = run_experiment(&base_cfg, base_var, instances, runs_per_instance, master_seed, options)?;
    let var = run_experiment(&var_cfg, var_var, instances, runs_per_instance, master_seed, options)?;
    Ok(row(pair, "simulation", (&base).into(), (&var).into()))
}

/// Analytic variant of [`compare_models`]; query counts are not modelled
/// analytically and report as zero change.
pub fn compare_models_analytic(config: &SearchConfig, pair: ComparisonPair) -> Result<ComparisonRow> {
    let ((base_cfg, base_var), (var_cfg, var_var)) = resolve(config, pair)?;
    let metrics_for = |cfg: &SearchConfig, variant: Variant| -> Result<MetricsTriple> {
        let m = match variant {
            Variant::Blind => blind_metrics(cfg)?,
            Variant::Smart => {
                if cfg.stifling > 0.0 {
                    return Err(Error::Domain(
                        "no analytic model for smart search with stiflers".into(),
                    ));
                }
                smart_metrics(cfg)?
            }
        };
        Ok(MetricsTriple {
            mean_rounds: m.mean_rounds,
            mean_active: m.mean_active,
            mean_queries: 0.0,
        })
    };
    let base = metrics_for(&base_cfg, base_var)?;
    let var = metrics_for(&var_cfg, var_var)?;
    Ok(row(pair, "analytic", base, var))
}
