//! Experiment orchestration: scaling fits, accuracy tables, model
//! comparisons, complexity benchmarks and file-based outputs.

mod accuracy;
mod bench;
mod compare;
mod fit;
mod output;

pub use accuracy::{accuracy_table, AccuracyCell, PAPER_KM_PAIRS, PAPER_N_GRID};
pub use bench::{benchmark_complexity, BenchReport, BenchRow};
pub use compare::{
    compare_models, compare_models_analytic, ComparisonPair, ComparisonRow, MetricsTriple,
};
pub use fit::{fit_scaling, FitForm, FitResult, LogBase};
pub use output::{
    parse_csv, rows_to_csv, sort_rows, write_atomic, write_manifest, CsvRow, Manifest,
};
