//! Wall-clock comparison of the exact chain (matrix power by repeated
//! squaring) against the approximate pmf across network sizes.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analytic_blind::blind_round_pmf;
use crate::exact_blind::ExactBlindModel;
use crate::{Result, SearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub num_nodes: u32,
    pub exact_seconds: f64,
    pub approx_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rounds: u64,
    pub rows: Vec<BenchRow>,
    /// Fitted growth exponents of time vs N (log-log least squares).
    pub exact_exponent: f64,
    pub approx_exponent: f64,
}

fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0.ln()).sum();
    let sy: f64 = points.iter().map(|p| p.1.ln()).sum();
    let sxx: f64 = points.iter().map(|p| p.0.ln().powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| p.0.ln() * p.1.ln()).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Times B(rounds) through the exact pipeline (matrix build plus power by
/// repeated squaring) against the approximate pmf of the same depth. The
/// approximate side is far below timer resolution, so it is repeated and
/// averaged.
pub fn benchmark_complexity(
    n_grid: &[u32],
    rounds: u64,
    fanout: u32,
    approx_repeats: u32,
) -> Result<BenchReport> {
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let config = SearchConfig::plain(n, fanout, 1, 1.0)?;
        let t0 = Instant::now();
        let model = ExactBlindModel::new(&config)?;
        let exact_value = model.find_by_squaring(rounds);
        let exact_seconds = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let mut sink = 0.0;
        for _ in 0..approx_repeats.max(1) {
            let pmf = blind_round_pmf(&config)?;
            sink += pmf.probs.iter().take(rounds as usize).sum::<f64>();
        }
        let approx_seconds = t1.elapsed().as_secs_f64() / approx_repeats.max(1) as f64;
        debug_assert!(exact_value >= 0.0 && sink >= 0.0);
        rows.push(BenchRow {
            num_nodes: n,
            exact_seconds,
            approx_seconds,
        });
    }
    let exact_exponent = loglog_slope(
        &rows
            .iter()
            .map(|r| (r.num_nodes as f64, r.exact_seconds))
            .collect::<Vec<_>>(),
    );
    let approx_exponent = loglog_slope(
        &rows
            .iter()
            .map(|r| (r.num_nodes as f64, r.approx_seconds))
            .collect::<Vec<_>>(),
    );
    Ok(BenchReport {
        rounds,
        rows,
        exact_exponent,
        approx_exponent,
    })
}
