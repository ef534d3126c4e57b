//! File outputs: the one-row-per-experiment-cell CSV schema, JSON
//! manifests, and atomic writes.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::core_math::SearchMetrics;
use crate::simulator::{SimReport, Variant};
use crate::{Error, Result, SearchConfig};

/// One experiment cell. Field order is the wire order:
/// `model,variant,N,k,m,c,s,mean_rounds,stderr_rounds,mean_active,
/// stderr_active,mean_queries,replications,seed`.
///
/// Analytic and exact rows carry zero stderr, zero query count, zero
/// replications and zero seed; simulation rows fill everything.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub model: String,
    pub variant: String,
    #[serde(rename = "N")]
    pub num_nodes: u32,
    pub k: u32,
    pub m: u32,
    pub c: f64,
    pub s: f64,
    pub mean_rounds: f64,
    pub stderr_rounds: f64,
    pub mean_active: f64,
    pub stderr_active: f64,
    pub mean_queries: f64,
    pub replications: u64,
    pub seed: u64,
}

impl CsvRow {
    pub fn from_metrics(config: &SearchConfig, variant: Variant, metrics: &SearchMetrics) -> Self {
        CsvRow {
            model: metrics.source.as_str().to_string(),
            variant: variant.as_str().to_string(),
            num_nodes: config.num_nodes,
            k: config.fanout,
            m: config.copies,
            c: config.cooperation,
            s: config.stifling,
            mean_rounds: metrics.mean_rounds,
            stderr_rounds: 0.0,
            mean_active: metrics.mean_active,
            stderr_active: 0.0,
            mean_queries: 0.0,
            replications: 0,
            seed: 0,
        }
    }

    pub fn from_report(report: &SimReport) -> Self {
        CsvRow {
            model: "simulation".to_string(),
            variant: report.variant.as_str().to_string(),
            num_nodes: report.config.num_nodes,
            k: report.config.fanout,
            m: report.config.copies,
            c: report.config.cooperation,
            s: report.config.stifling,
            mean_rounds: report.mean_rounds,
            stderr_rounds: report.stderr_rounds,
            mean_active: report.mean_active,
            stderr_active: report.stderr_active,
            mean_queries: report.mean_queries,
            replications: report.replications(),
            seed: report.master_seed,
        }
    }

    /// Lexicographic parameter-tuple key for deterministic row order.
    fn sort_key(&self) -> (String, String, u32, u32, u32, u64, u64) {
        (
            self.model.clone(),
            self.variant.clone(),
            self.num_nodes,
            self.k,
            self.m,
            self.c.to_bits(),
            self.s.to_bits(),
        )
    }
}

/// Sorts rows into the deterministic output order.
pub fn sort_rows(rows: &mut [CsvRow]) {
    rows.sort_by_key(|r| r.sort_key());
}

/// Serialises rows with the mandatory header. Floats print in shortest
/// round-trip form, so parse(serialize(x)) == x.
pub fn rows_to_csv(rows: &[CsvRow]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::Mismatch(format!("csv serialize: {e}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Mismatch(format!("csv flush: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Mismatch(format!("csv utf8: {e}")))
}

/// Parses a CSV document produced by [`rows_to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|r| r.map_err(|e| Error::Mismatch(format!("csv parse: {e}"))))
        .collect()
}

/// Everything needed to regenerate an output file bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    /// The invocation that produced the output.
    pub command: Vec<String>,
    pub master_seed: Option<u64>,
    pub rng_algorithm: Option<String>,
    /// Full parameter echo of the run.
    pub parameters: serde_json::Value,
    pub output_format: String,
    pub output_rows: usize,
}

impl Manifest {
    pub fn new(command: Vec<String>, parameters: serde_json::Value) -> Self {
        Manifest {
            tool: "gossip-search".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            master_seed: None,
            rng_algorithm: None,
            parameters,
            output_format: "csv".to_string(),
            output_rows: 0,
        }
    }
}

/// Writes through a temporary file in the same directory and renames into
/// place, so partially written outputs are never observed.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile_in(dir)?;
    tmp.1.write_all(contents.as_bytes())?;
    tmp.1.sync_all()?;
    drop(tmp.1);
    fs::rename(&tmp.0, path)
}

fn tempfile_in(dir: &Path) -> std::io::Result<(std::path::PathBuf, fs::File)> {
    use std::time::{SystemTime, UNIX_EPOCH};
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.subsec_nanos())
        .unwrap_or(0);
    let path = dir.join(format!(".gossip-search-{}-{nanos}.tmp", std::process::id()));
    let file = fs::OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(&path)?;
    Ok((path, file))
}

/// Writes `<out>.manifest.json` next to an output file.
pub fn write_manifest(out_path: &Path, manifest: &Manifest) -> std::io::Result<()> {
    let mut name = out_path.as_os_str().to_owned();
    name.push(".manifest.json");
    let text = serde_json::to_string_pretty(manifest).expect("manifest serialises");
    write_atomic(Path::new(&name), &text)
}
