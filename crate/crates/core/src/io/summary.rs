//! Suite execution and the summary tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::records::{write_records_file, RecordsError};
use super::suite::Suite;
use crate::experiments::{run_condition, run_condition_with_workers, ConditionStats, ConfigError};

pub const SUMMARY_COLUMNS: [&str; 13] = [
    "condition",
    "mean",
    "median",
    "av_high",
    "av_low",
    "ct_high",
    "ct_low",
    "completions",
    "excluded_no_path",
    "excluded_immediate",
    "excluded_non_converging",
    "excluded_zero_oracle",
    "excluded_dropped",
];

#[derive(Debug, Error)]
pub enum RunSuiteError {
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot write records {path}: {source}")]
    Records { path: PathBuf, source: RecordsError },
    #[error("condition {name:?}: {source}")]
    Config { name: String, source: ConfigError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub condition: String,
    pub stats: ConditionStats<f64>,
}

fn cells(row: &SummaryRow, fmt: impl Fn(Option<f64>) -> String) -> Vec<String> {
    let s = &row.stats;
    let x = &s.exclusions;
    vec![
        row.condition.clone(),
        fmt(s.mean),
        fmt(s.median),
        fmt(s.av_high),
        fmt(s.av_low),
        s.ct_high.to_string(),
        s.ct_low.to_string(),
        s.completions.to_string(),
        x.no_path.to_string(),
        x.immediate.to_string(),
        x.non_converging.to_string(),
        x.zero_oracle.to_string(),
        x.dropped.to_string(),
    ]
}

/// Machine-readable summary. Absent averages are empty cells.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_COLUMNS).expect("in-memory write");
    for row in rows {
        w.write_record(cells(row, |v| v.map(|v| v.to_string()).unwrap_or_default())).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

/// Human-readable summary with aligned columns.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let mut table: Vec<Vec<String>> = vec![SUMMARY_COLUMNS.iter().map(|s| s.to_string()).collect()];
    table.extend(rows.iter().map(|r| cells(r, |v| v.map_or("-".into(), |v| format!("{v:.6}")))));
    let widths: Vec<usize> =
        (0..SUMMARY_COLUMNS.len()).map(|c| table.iter().map(|row| row[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &table {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                let _ = write!(line, "{cell:<w$}", w = widths[c]);
            } else {
                let _ = write!(line, "  {cell:>w$}", w = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn write(path: &Path, contents: &str) -> Result<(), RunSuiteError> {
    fs::write(path, contents).map_err(|source| RunSuiteError::Write { path: path.to_path_buf(), source })
}

/// Runs every condition and writes `summary.csv`, `summary.txt` and
/// `records/<condition>.csv` under the suite's output directory.
/// `workers = None` uses the global thread pool.
pub fn run_suite(suite: &Suite, workers: Option<usize>) -> Result<Vec<SummaryRow>, RunSuiteError> {
    let records_dir = suite.output_dir.join("records");
    fs::create_dir_all(&records_dir).map_err(|source| RunSuiteError::Write { path: records_dir.clone(), source })?;
    let mut rows = Vec::with_capacity(suite.conditions.len());
    for cond in &suite.conditions {
        let result = match workers {
            Some(n) => run_condition_with_workers(&cond.config, n),
            None => run_condition(&cond.config),
        };
        let (stats, records) = result.map_err(|source| RunSuiteError::Config { name: cond.name.clone(), source })?;
        let path = records_dir.join(format!("{}.csv", cond.name));
        write_records_file(&path, &records).map_err(|source| RunSuiteError::Records { path, source })?;
        rows.push(SummaryRow { condition: cond.name.clone(), stats });
    }
    write(&suite.output_dir.join("summary.csv"), &summary_csv(&rows))?;
    write(&suite.output_dir.join("summary.txt"), &summary_table(&rows))?;
    Ok(rows)
}
