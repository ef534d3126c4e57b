//! Exact-vs-approximate accuracy table for the blind search model at full
//! cooperation.

use serde::{Deserialize, Serialize};

use crate::analytic_blind::blind_metrics;
use crate::exact_blind::{relative_accuracy, AccuracyReport, ExactBlindModel};
use crate::{Result, SearchConfig};

/// Parameter rows of the published accuracy table.
pub const PAPER_KM_PAIRS: [(u32, u32); 3] = [(1, 1), (1, 3), (3, 1)];
/// Network sizes of the published accuracy table.
pub const PAPER_N_GRID: [u32; 5] = [10, 20, 30, 40, 50];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCell {
    pub fanout: u32,
    pub copies: u32,
    pub num_nodes: u32,
    pub rounds: AccuracyReport,
    pub active: AccuracyReport,
}

/// Computes exact and approximate metrics for every (k, m) x N cell and
/// reports the relative accuracy of the approximation, two decimals.
/// Rows come out in (k, m, N) order.
pub fn accuracy_table(km_pairs: &[(u32, u32)], n_grid: &[u32]) -> Result<Vec<AccuracyCell>> {
    let mut cells = Vec::with_capacity(km_pairs.len() * n_grid.len());
    let mut pairs = km_pairs.to_vec();
    pairs.sort_unstable();
    let mut ns = n_grid.to_vec();
    ns.sort_unstable();
    for &(fanout, copies) in &pairs {
        for &num_nodes in &ns {
            let config = SearchConfig::plain(num_nodes, fanout, copies, 1.0)?;
            let exact = ExactBlindModel::new(&config)?.metrics()?;
            let approx = blind_metrics(&config)?;
            let acc = relative_accuracy(&exact, &approx)?;
            cells.push(AccuracyCell {
                fanout,
                copies,
                num_nodes,
                rounds: acc.rounds,
                active: acc.active,
            });
        }
    }
    Ok(cells)
}
