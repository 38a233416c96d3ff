//! Per-run record files (`seed,status,error,rules_after_prune`).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::experiments::{RecordStatus, RunRecord};

pub const RECORD_COLUMNS: [&str; 4] = ["seed", "status", "error", "rules_after_prune"];

#[derive(Debug, Error)]
pub enum RecordsError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {found:?}, expected {expected:?}")]
    Header { found: Vec<String>, expected: Vec<String> },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
}

pub fn write_records<W: Write>(out: W, records: &[RunRecord<f64>]) -> Result<(), RecordsError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        let error = r.error.map(|e| e.to_string()).unwrap_or_default();
        w.write_record([
            r.seed.to_string().as_str(),
            r.status.as_str(),
            error.as_str(),
            r.rules_after_prune.to_string().as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord<f64>>, RecordsError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != RECORD_COLUMNS {
        return Err(RecordsError::Header {
            found: header,
            expected: RECORD_COLUMNS.iter().map(|s| s.to_string()).collect(),
        });
    }
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |message: String| RecordsError::Row { line, message };
        let seed = row[0].parse().map_err(|e| bad(format!("seed: {e}")))?;
        let status = RecordStatus::parse(&row[1]).ok_or_else(|| bad(format!("unknown status {:?}", &row[1])))?;
        let error = match &row[2] {
            "" => None,
            s => Some(s.parse::<f64>().map_err(|e| bad(format!("error: {e}")))?),
        };
        if error.is_some() != (status == RecordStatus::Completed) {
            return Err(bad("error must be present exactly for completed runs".into()));
        }
        if let Some(e) = error {
            if !(0.0..=1.0).contains(&e) {
                return Err(bad(format!("error {e} outside [0, 1]")));
            }
        }
        let rules_after_prune = row[3].parse().map_err(|e| bad(format!("rules_after_prune: {e}")))?;
        records.push(RunRecord { seed, status, error, rules_after_prune });
    }
    Ok(records)
}

pub fn write_records_file(path: &Path, records: &[RunRecord<f64>]) -> Result<(), RecordsError> {
    write_records(File::create(path)?, records)
}

pub fn read_records_file(path: &Path) -> Result<Vec<RunRecord<f64>>, RecordsError> {
    read_records(File::open(path)?)
}
