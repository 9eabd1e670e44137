use std::collections::BTreeMap;
use std::io::{BufRead, BufReader};
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Suite;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The suite needs `p >= 5`.
    Unsupported,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub detail: String,
}

impl Violation {
    pub fn new(check: &str, detail: impl Into<String>) -> Self {
        Self { check: check.to_string(), detail: detail.into() }
    }
}

/// One line of a suite's JSONL output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub schema_version: u32,
    pub p: u64,
    pub suite: Suite,
    pub status: Status,
    pub data: Value,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunReport {
    pub records: Vec<Record>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn violation_count(&self) -> usize {
        self.records.iter().map(|r| r.violations.len()).sum()
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }
}

pub fn read_jsonl(path: &Path) -> Result<Vec<Record>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line)
            .map_err(|e| CliError::Parse(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

/// Concatenate record files, keeping the last record seen for each
/// `(p, suite)`; files later in `paths` take precedence.
pub fn report_merge(paths: &[PathBuf]) -> Result<RunReport, CliError> {
    let mut version: Option<(u32, &Path)> = None;
    let mut merged: BTreeMap<(Suite, u64), Record> = BTreeMap::new();
    for path in paths {
        for rec in read_jsonl(path)? {
            match version {
                None => version = Some((rec.schema_version, path)),
                Some((v, first)) if v != rec.schema_version => {
                    return Err(CliError::SchemaMismatch {
                        expected: v,
                        found: rec.schema_version,
                        first: first.to_path_buf(),
                        path: path.clone(),
                    })
                }
                Some(_) => {}
            }
            merged.insert((rec.suite, rec.p), rec);
        }
    }
    Ok(RunReport { records: merged.into_values().collect(), files: Vec::new() })
}
