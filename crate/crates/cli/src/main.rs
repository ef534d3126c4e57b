//! Command-line front end: analytic and exact model evaluation, seeded
//! Monte-Carlo experiments, accuracy tables, model comparisons, scaling
//! fits and complexity benchmarks, with CSV/JSON outputs and a JSON
//! manifest next to every output file.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gossip_search_core::analysis::{
    accuracy_table, benchmark_complexity, compare_models, compare_models_analytic, fit_scaling,
    parse_csv, rows_to_csv, sort_rows, write_atomic, write_manifest, ComparisonPair, CsvRow,
    FitForm, Manifest, PAPER_KM_PAIRS, PAPER_N_GRID,
};
use gossip_search_core::analytic_blind::blind_metrics;
use gossip_search_core::analytic_smart::{smart_metrics, Exactness, SmartChain};
use gossip_search_core::exact_blind::exact_metrics;
use gossip_search_core::simulator::{
    run_experiment, CooperationPersistence, SimOptions, Variant,
};
use gossip_search_core::{Error as CoreError, SearchConfig};

#[derive(Parser)]
#[command(
    name = "gossip-search",
    version,
    about = "Models and Monte-Carlo simulation of gossip-based file search on a complete graph"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Blind,
    Smart,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Blind => Variant::Blind,
            VariantArg::Smart => Variant::Smart,
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Total number of nodes, including the initiator.
    #[arg(long = "nodes", short = 'n')]
    nodes: u32,
    /// Neighbours queried per active node per round.
    #[arg(long = "fanout", short = 'k', default_value_t = 1)]
    fanout: u32,
    /// Copies of the file in the network.
    #[arg(long = "copies", short = 'm', default_value_t = 1)]
    copies: u32,
    /// Cooperation probability of queried nodes.
    #[arg(long = "coop", short = 'c', default_value_t = 1.0)]
    coop: f64,
    /// Stifling probability (forces full cooperation).
    #[arg(long = "stifle", short = 's', default_value_t = 0.0)]
    stifle: f64,
    /// Truncation threshold for round distributions.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
}

impl ModelArgs {
    fn config(&self) -> Result<SearchConfig, CoreError> {
        let config = if self.stifle > 0.0 {
            SearchConfig::stifler(self.nodes, self.fanout, self.copies, self.stifle)?
        } else {
            SearchConfig::plain(self.nodes, self.fanout, self.copies, self.coop)?
        };
        config.with_epsilon(self.epsilon)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write results to this file (a .manifest.json lands next to it).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Deterministic-trajectory blind-search model (plain or stifler).
    AnalyticBlind {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Occupancy-chain smart-search model.
    AnalyticSmart {
        #[command(flatten)]
        model: ModelArgs,
        /// Build the transition matrix in floating point (faster, checked
        /// for cancellation) instead of exact rationals.
        #[arg(long)]
        float_matrix: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact Markov baseline for blind search at full cooperation.
    ExactBlind {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Seeded Monte-Carlo experiment (instances x runs replications).
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = VariantArg::Blind)]
        variant: VariantArg,
        /// Random file placements.
        #[arg(long, default_value_t = 100)]
        instances: u32,
        /// Executions per placement.
        #[arg(long, default_value_t = 100)]
        runs: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Plain nodes decide cooperation once instead of per round.
        #[arg(long)]
        decide_once: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact-vs-approximate accuracy table for blind search (c = 1).
    AccuracyTable {
        /// Comma-separated network sizes.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n_grid: Option<Vec<u32>>,
        /// Comma-separated k:m pairs, e.g. 1:1,1:3,3:1.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        pairs: Option<Vec<String>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Relative-change comparison between paired experiments.
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        pair: PairArg,
        #[arg(long, default_value_t = 100)]
        instances: u32,
        #[arg(long, default_value_t = 100)]
        runs: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Compare analytic models instead of simulations.
        #[arg(long)]
        analytic: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Least-squares scaling fit of a blind-model metric over N.
    Fit {
        #[arg(long, value_enum, default_value_t = MetricArg::Active)]
        metric: MetricArg,
        #[arg(long, value_enum, default_value_t = FormArg::Linear)]
        form: FormArg,
        /// Comma-separated network sizes.
        #[arg(long, value_delimiter = ',', num_args = 1..,
              default_value = "100,1000,10000,100000")]
        n_grid: Vec<u32>,
        #[arg(long, default_value_t = 1)]
        fanout: u32,
        #[arg(long, default_value_t = 1)]
        copies: u32,
        #[arg(long, default_value_t = 1.0)]
        coop: f64,
        #[arg(long, default_value_t = 0.0)]
        stifle: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Wall-clock growth of the exact pipeline vs the approximate pmf.
    Bench {
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "50,100,200")]
        n_grid: Vec<u32>,
        #[arg(long, default_value_t = 32)]
        rounds: u64,
        #[arg(long, default_value_t = 1)]
        fanout: u32,
        /// Averaging repeats for the (much faster) approximate side.
        #[arg(long, default_value_t = 1000)]
        repeats: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PairArg {
    Copies,
    Fanout,
    Smart,
    StiflerDual,
    SmartStifler,
}

impl From<PairArg> for ComparisonPair {
    fn from(p: PairArg) -> ComparisonPair {
        match p {
            PairArg::Copies => ComparisonPair::CopiesOneToThree,
            PairArg::Fanout => ComparisonPair::FanoutOneToThree,
            PairArg::Smart => ComparisonPair::SmartVsBlind,
            PairArg::StiflerDual => ComparisonPair::StiflerVsDualPlain,
            PairArg::SmartStifler => ComparisonPair::SmartStiflerVsBlindStifler,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Rounds,
    Active,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Linear,
    Log,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<CoreError>()
                .map(|e| e.exit_code())
                .unwrap_or(1);
            ExitCode::from(code as u8)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::AnalyticBlind { model, output } => {
            let config = model.config()?;
            let metrics = blind_metrics(&config)?;
            let rows = vec![CsvRow::from_metrics(&config, Variant::Blind, &metrics)];
            emit_rows(rows, &output, manifest_for(&config, None))
        }
        Command::AnalyticSmart {
            model,
            float_matrix,
            output,
        } => {
            let config = model.config()?;
            let metrics = if float_matrix {
                SmartChain::with_exactness(&config, Exactness::Float)?
                    .evaluate()?
                    .metrics
            } else {
                smart_metrics(&config)?
            };
            let rows = vec![CsvRow::from_metrics(&config, Variant::Smart, &metrics)];
            emit_rows(rows, &output, manifest_for(&config, None))
        }
        Command::ExactBlind { model, output } => {
            let config = model.config()?;
            let metrics = exact_metrics(&config)?;
            let rows = vec![CsvRow::from_metrics(&config, Variant::Blind, &metrics)];
            emit_rows(rows, &output, manifest_for(&config, None))
        }
        Command::Simulate {
            model,
            variant,
            instances,
            runs,
            seed,
            decide_once,
            output,
        } => {
            let config = model.config()?;
            let options = SimOptions {
                persistence: if decide_once {
                    CooperationPersistence::DecideOnce
                } else {
                    CooperationPersistence::Redecide
                },
            };
            let report =
                run_experiment(&config, variant.into(), instances, runs, seed, options)?;
            let rows = vec![CsvRow::from_report(&report)];
            let mut manifest = manifest_for(&config, Some(seed));
            manifest.rng_algorithm = Some(report.rng_algorithm.clone());
            emit_rows(rows, &output, manifest)
        }
        Command::AccuracyTable {
            n_grid,
            pairs,
            output,
        } => {
            let ns = n_grid.unwrap_or_else(|| PAPER_N_GRID.to_vec());
            let km: Vec<(u32, u32)> = match pairs {
                None => PAPER_KM_PAIRS.to_vec(),
                Some(raw) => raw
                    .iter()
                    .map(|p| parse_pair(p))
                    .collect::<anyhow::Result<Vec<_>>>()?,
            };
            let cells = accuracy_table(&km, &ns)?;
            let manifest = Manifest::new(
                std::env::args().collect(),
                serde_json::json!({ "n_grid": ns, "pairs": km }),
            );
            match output.format {
                Format::Json => emit_json(&cells, &output, manifest),
                Format::Csv => {
                    let mut text = String::from(
                        "k,m,N,exact_rounds,approx_rounds,accuracy_rounds,exact_active,approx_active,accuracy_active\n",
                    );
                    for c in &cells {
                        text.push_str(&format!(
                            "{},{},{},{},{},{:.2},{},{},{:.2}\n",
                            c.fanout,
                            c.copies,
                            c.num_nodes,
                            c.rounds.exact,
                            c.rounds.approx,
                            c.rounds.accuracy_pct,
                            c.active.exact,
                            c.active.approx,
                            c.active.accuracy_pct
                        ));
                    }
                    emit_text(text, &output, manifest)
                }
            }
        }
        Command::Compare {
            model,
            pair,
            instances,
            runs,
            seed,
            analytic,
            output,
        } => {
            let config = model.config()?;
            let row = if analytic {
                compare_models_analytic(&config, pair.into())?
            } else {
                compare_models(&config, pair.into(), instances, runs, seed)?
            };
            println!(
                "{}: rounds {:+.2}%  active {:+.2}%  queries {:+.2}%",
                row.pair.as_str(),
                row.pct_rounds,
                row.pct_active,
                row.pct_queries
            );
            let mut manifest = manifest_for(&config, Some(seed));
            manifest.parameters["pair"] = serde_json::json!(row.pair.as_str());
            emit_json(&row, &output, manifest)
        }
        Command::Fit {
            metric,
            form,
            n_grid,
            fanout,
            copies,
            coop,
            stifle,
            output,
        } => {
            let points: Vec<(f64, f64)> = n_grid
                .iter()
                .map(|&n| -> anyhow::Result<(f64, f64)> {
                    let config = if stifle > 0.0 {
                        SearchConfig::stifler(n, fanout, copies, stifle)?
                    } else {
                        SearchConfig::plain(n, fanout, copies, coop)?
                    };
                    let m = blind_metrics(&config)?;
                    let y = match metric {
                        MetricArg::Rounds => m.mean_rounds,
                        MetricArg::Active => m.mean_active,
                    };
                    Ok((n as f64, y))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let fits = fit_scaling(
                &points,
                match form {
                    FormArg::Linear => FitForm::Linear,
                    FormArg::Log => FitForm::LogLinear,
                },
            )?;
            for f in &fits {
                let term = match f.base {
                    Some(b) => format!("{}(N)", b.as_str()),
                    None => "N".to_string(),
                };
                println!(
                    "y = {:.6} * {term} + {:.6}   (R^2 = {:.6})",
                    f.slope, f.intercept, f.r_squared
                );
            }
            let manifest = Manifest::new(
                std::env::args().collect(),
                serde_json::json!({
                    "metric": match metric { MetricArg::Rounds => "rounds", MetricArg::Active => "active" },
                    "n_grid": n_grid, "fanout": fanout, "copies": copies,
                    "coop": coop, "stifle": stifle,
                }),
            );
            emit_json(&fits, &output, manifest)
        }
        Command::Bench {
            n_grid,
            rounds,
            fanout,
            repeats,
            output,
        } => {
            let report = benchmark_complexity(&n_grid, rounds, fanout, repeats)?;
            for r in &report.rows {
                println!(
                    "N={}: exact {:.4}s  approx {:.3e}s",
                    r.num_nodes, r.exact_seconds, r.approx_seconds
                );
            }
            println!(
                "growth exponents: exact {:.2}, approx {:.2}",
                report.exact_exponent, report.approx_exponent
            );
            let manifest = Manifest::new(
                std::env::args().collect(),
                serde_json::json!({ "n_grid": n_grid, "rounds": rounds, "fanout": fanout }),
            );
            emit_json(&report, &output, manifest)
        }
    }
}

fn parse_pair(raw: &str) -> anyhow::Result<(u32, u32)> {
    let (k, m) = raw
        .split_once(':')
        .ok_or_else(|| anyhow::anyhow!("pair must look like k:m, got {raw:?}"))?;
    Ok((k.trim().parse()?, m.trim().parse()?))
}

fn manifest_for(config: &SearchConfig, seed: Option<u64>) -> Manifest {
    let mut manifest = Manifest::new(
        std::env::args().collect(),
        serde_json::to_value(config).expect("config serialises"),
    );
    manifest.master_seed = seed;
    manifest
}

fn emit_rows(mut rows: Vec<CsvRow>, output: &OutputArgs, mut manifest: Manifest) -> anyhow::Result<()> {
    sort_rows(&mut rows);
    manifest.output_rows = rows.len();
    match output.format {
        Format::Csv => {
            manifest.output_format = "csv".into();
            let text = rows_to_csv(&rows)?;
            debug_assert_eq!(parse_csv(&text)?, rows);
            emit_text(text, output, manifest)
        }
        Format::Json => {
            manifest.output_format = "json".into();
            let text = serde_json::to_string_pretty(&rows)?;
            emit_text(text + "\n", output, manifest)
        }
    }
}

fn emit_json<T: serde::Serialize>(
    value: &T,
    output: &OutputArgs,
    mut manifest: Manifest,
) -> anyhow::Result<()> {
    manifest.output_format = "json".into();
    let text = serde_json::to_string_pretty(value)? + "\n";
    emit_text(text, output, manifest)
}

fn emit_text(text: String, output: &OutputArgs, manifest: Manifest) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => {
            write_atomic(path, &text)?;
            write_manifest(Path::new(path), &manifest)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}
