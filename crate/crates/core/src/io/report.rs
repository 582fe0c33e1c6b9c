use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{BenchReport, CellResult, RpcCurve, TimingRow};
use crate::descriptors::{DescriptorKind, DescriptorParams};
use crate::error::{Error, Result};

pub const REPORT_CSV: &str = "report.csv";
pub const TIMING_CSV: &str = "timing.csv";
pub const FAILURES_CSV: &str = "failures.csv";
pub const REPORT_TXT: &str = "report.txt";
pub const METADATA_FILE: &str = "metadata.toml";
pub const RPC_DIR: &str = "rpc";

/// One descriptor × condition row of `report.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub kind: String,
    pub condition: String,
    pub level: Option<f64>,
    pub auc: f64,
    pub bytes: usize,
    pub n_corr: usize,
    pub n_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingCsvRow {
    pub kind: String,
    pub condition: String,
    pub level: Option<f64>,
    pub mean_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpcRow {
    pub tau: f64,
    pub one_minus_precision: f64,
    pub recall: f64,
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    crate_version: &'a str,
    dataset: &'a str,
    created_unix: u64,
    seed: u64,
    n_keypoints: usize,
    tau_steps: usize,
    radius_pr: f64,
    inlier_radius_pr: f64,
    repeats: usize,
    normal_k: usize,
    jobs: Option<usize>,
    pairs: usize,
    failures: usize,
    kinds: Vec<&'a str>,
    conditions: Vec<String>,
    params: &'a DescriptorParams,
}

impl ReportRow {
    pub fn from_cell(cell: &CellResult) -> Self {
        ReportRow {
            kind: cell.kind.name().into(),
            condition: cell.condition.label(),
            level: cell.condition.level(),
            auc: cell.auc,
            bytes: cell.bytes,
            n_corr: cell.n_corr,
            n_pairs: cell.n_pairs,
        }
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], headers: &[&str]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(headers)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

pub fn read_report_csv(path: &Path) -> Result<Vec<ReportRow>> {
    read_csv(path)
}

pub fn write_rpc_csv(path: &Path, curve: &RpcCurve) -> Result<()> {
    let rows: Vec<RpcRow> = curve
        .points
        .iter()
        .map(|p| RpcRow {
            tau: p.tau,
            one_minus_precision: p.one_minus_precision,
            recall: p.recall,
        })
        .collect();
    write_csv(path, &rows, &["tau", "one_minus_precision", "recall"])
}

/// File name of a cell's curve inside the `rpc` directory.
pub fn rpc_file_name(cell: &CellResult) -> String {
    let mut name = format!(
        "{}_{}",
        cell.kind.name().to_ascii_lowercase(),
        cell.condition.label()
    );
    if let Some(l) = cell.condition.level() {
        write!(name, "_{l}").unwrap();
    }
    let clean: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.=".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    clean + ".csv"
}

/// Human-readable summary, one block per condition. Timings are left to
/// `timing.csv` so that the summary is reproducible.
pub fn format_report(report: &BenchReport) -> String {
    let mut s = String::new();
    let o = &report.options;
    writeln!(s, "dataset: {}", report.dataset).unwrap();
    writeln!(
        s,
        "pairs: {}  seed: {}  keypoints: {}  radius: {} pr  repeats: {}  thresholds: {}",
        report.pair_count, o.seed, o.n_keypoints, o.radius_pr, o.repeats, o.tau_steps
    )
    .unwrap();
    for condition in &report.conditions {
        writeln!(s, "\n[{condition}]").unwrap();
        writeln!(
            s,
            "{:<8} {:>8} {:>8} {:>8} {:>6}",
            "kind", "auc", "bytes", "n_corr", "runs"
        )
        .unwrap();
        for cell in report.cells.iter().filter(|c| &c.condition == condition) {
            writeln!(
                s,
                "{:<8} {:>8.4} {:>8} {:>8} {:>6}",
                cell.kind.name(),
                cell.auc,
                cell.bytes,
                cell.n_corr,
                cell.n_pairs
            )
            .unwrap();
        }
    }
    if !report.failures.is_empty() {
        writeln!(s, "\nfailures:").unwrap();
        for f in &report.failures {
            writeln!(
                s,
                "  {} [{}] repeat {}: {}",
                f.pair, f.condition, f.repeat, f.message
            )
            .unwrap();
        }
    }
    s
}

/// Write `report.csv`, `timing.csv`, `failures.csv`, one curve per cell
/// under `rpc/`, `report.txt` and `metadata.toml` into `dir`.
///
/// Everything except the timing file and the metadata timestamp is a pure
/// function of the report.
pub fn write_report(report: &BenchReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let rpc_dir = dir.join(RPC_DIR);
    std::fs::create_dir_all(&rpc_dir).map_err(|e| Error::io(&rpc_dir, e))?;
    let mut written = Vec::new();

    let rows: Vec<ReportRow> = report.cells.iter().map(ReportRow::from_cell).collect();
    let path = dir.join(REPORT_CSV);
    write_csv(
        &path,
        &rows,
        &[
            "kind",
            "condition",
            "level",
            "auc",
            "bytes",
            "n_corr",
            "n_pairs",
        ],
    )?;
    written.push(path);

    let timing: Vec<TimingCsvRow> = report
        .cells
        .iter()
        .map(|c| TimingCsvRow {
            kind: c.kind.name().into(),
            condition: c.condition.label(),
            level: c.condition.level(),
            mean_time_ms: c.mean_time_ms,
        })
        .collect();
    let path = dir.join(TIMING_CSV);
    write_csv(
        &path,
        &timing,
        &["kind", "condition", "level", "mean_time_ms"],
    )?;
    written.push(path);

    #[derive(Serialize)]
    struct FailureRow<'a> {
        pair: &'a str,
        condition: &'a str,
        repeat: usize,
        message: &'a str,
    }
    let failures: Vec<FailureRow> = report
        .failures
        .iter()
        .map(|f| FailureRow {
            pair: &f.pair,
            condition: &f.condition,
            repeat: f.repeat,
            message: &f.message,
        })
        .collect();
    let path = dir.join(FAILURES_CSV);
    write_csv(
        &path,
        &failures,
        &["pair", "condition", "repeat", "message"],
    )?;
    written.push(path);

    for cell in &report.cells {
        let path = rpc_dir.join(rpc_file_name(cell));
        write_rpc_csv(&path, &cell.rpc)?;
        written.push(path);
    }

    let path = dir.join(REPORT_TXT);
    std::fs::write(&path, format_report(report)).map_err(|e| Error::io(&path, e))?;
    written.push(path);

    let o = &report.options;
    let meta = Metadata {
        crate_version: env!("CARGO_PKG_VERSION"),
        dataset: &report.dataset,
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        seed: o.seed,
        n_keypoints: o.n_keypoints,
        tau_steps: o.tau_steps,
        radius_pr: o.radius_pr,
        inlier_radius_pr: o.inlier_radius_pr,
        repeats: o.repeats,
        normal_k: o.normal_k,
        jobs: o.jobs,
        pairs: report.pair_count,
        failures: report.failures.len(),
        kinds: report.kinds.iter().map(|k| k.name()).collect(),
        conditions: report.conditions.iter().map(|c| c.to_string()).collect(),
        params: &o.params,
    };
    let path = dir.join(METADATA_FILE);
    let text = toml::to_string(&meta).map_err(|e| Error::invalid(format!("metadata: {e}")))?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

/// Merge rows from several `report.csv` files: rows sharing kind, condition
/// and level are combined with AUCs weighted by run count.
pub fn aggregate_reports(paths: &[PathBuf]) -> Result<Vec<ReportRow>> {
    let mut merged: BTreeMap<(String, u64, usize, String), ReportRow> = BTreeMap::new();
    for path in paths {
        for row in read_report_csv(path)? {
            let order = row
                .kind
                .parse::<DescriptorKind>()
                .map_or(usize::MAX, |k| k.tag() as usize);
            let key = (
                row.condition.clone(),
                row.level.map_or(u64::MAX, f64::to_bits),
                order,
                row.kind.clone(),
            );
            match merged.get_mut(&key) {
                Some(acc) => {
                    let runs = acc.n_pairs + row.n_pairs;
                    if runs > 0 {
                        acc.auc = (acc.auc * acc.n_pairs as f64 + row.auc * row.n_pairs as f64)
                            / runs as f64;
                    }
                    acc.n_pairs = runs;
                    acc.n_corr += row.n_corr;
                }
                None => {
                    merged.insert(key, row);
                }
            }
        }
    }
    Ok(merged.into_values().collect())
}

pub fn write_report_rows(path: &Path, rows: &[ReportRow]) -> Result<()> {
    write_csv(
        path,
        rows,
        &[
            "kind",
            "condition",
            "level",
            "auc",
            "bytes",
            "n_corr",
            "n_pairs",
        ],
    )
}

/// `report.csv` rows as CSV text.
pub fn report_rows_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record([
            "kind",
            "condition",
            "level",
            "auc",
            "bytes",
            "n_corr",
            "n_pairs",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One line of the timing protocol output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingProtocolRow {
    pub kind: String,
    pub radius_pr: f64,
    pub patches: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
}

pub fn write_timing_rows(path: &Path, rows: &[TimingRow]) -> Result<()> {
    let rows: Vec<TimingProtocolRow> = rows
        .iter()
        .map(|r| TimingProtocolRow {
            kind: r.kind.name().into(),
            radius_pr: r.radius_pr,
            patches: r.patches,
            mean_ms: r.mean_ms,
            median_ms: r.median_ms,
        })
        .collect();
    write_csv(
        path,
        &rows,
        &["kind", "radius_pr", "patches", "mean_ms", "median_ms"],
    )
}
