use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use markoff_core::{FactorCache, PrimeContext};

use crate::config::{RunConfig, Suite};
use crate::record::{Record, RunReport, Status, SCHEMA_VERSION};
use crate::suites::run_suite;
use crate::CliError;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one task, independent of scheduling.
pub fn task_seed(seed: u64, p: u64, suite: Suite) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ p) ^ suite as u64)
}

fn load_cache(path: Option<&Path>) -> Result<FactorCache, CliError> {
    match path {
        Some(p) if p.exists() => Ok(FactorCache::load(p)?),
        _ => Ok(FactorCache::new()),
    }
}

fn run_task(suite: Suite, p: u64, ctx: Option<&PrimeContext>, seed: u64) -> Result<Record, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(task_seed(seed, p, suite));
    let (status, data, violations) = match run_suite(suite, p, ctx, &mut rng)? {
        None => (Status::Unsupported, Value::Null, Vec::new()),
        Some(out) => {
            let status = if out.violations.is_empty() { Status::Pass } else { Status::Fail };
            (status, out.data, out.violations)
        }
    };
    Ok(Record { schema_version: SCHEMA_VERSION, p, suite, status, data, violations })
}

pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let primes = cfg.primes.primes();
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();

    let mut cache = load_cache(cfg.cache.as_deref())?;
    let mut contexts = BTreeMap::new();
    for &p in primes.iter().filter(|&&p| p >= 5) {
        contexts.insert(p, PrimeContext::with_cache(p, &mut cache)?);
    }
    if let Some(path) = &cfg.cache {
        cache.save(path)?;
    }

    let tasks: Vec<(Suite, u64)> = suites.iter().flat_map(|&s| primes.iter().map(move |&p| (s, p))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let records = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(s, p)| run_task(s, p, contexts.get(&p), cfg.seed))
            .collect::<Result<Vec<_>, _>>()
    })?;

    fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::io(&cfg.out_dir, e))?;
    let mut files = Vec::new();
    for &suite in &suites {
        let rows: Vec<&Record> = records.iter().filter(|r| r.suite == suite).collect();
        let jsonl = cfg.out_dir.join(format!("{suite}.jsonl"));
        write_jsonl(&jsonl, &rows)?;
        files.push(jsonl);
        let csv = cfg.out_dir.join(format!("{suite}.csv"));
        write_summary_csv(&csv, &rows)?;
        files.push(csv);
        if suite == Suite::Counting {
            let trace = cfg.out_dir.join("counting_trace.csv");
            write_trace_csv(&trace, &rows)?;
            files.push(trace);
        }
    }
    Ok(RunReport { records, files })
}

pub fn write_jsonl(path: &Path, rows: &[&Record]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in rows {
        let line = serde_json::to_string(r).map_err(|e| CliError::Parse(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Parse(format!("{}: {other:?}", path.display())),
    }
}

/// One row per prime: status, violation count and the scalar data fields.
pub fn write_summary_csv(path: &Path, rows: &[&Record]) -> Result<(), CliError> {
    let keys: BTreeSet<&String> = rows
        .iter()
        .filter_map(|r| r.data.as_object())
        .flat_map(|m| m.iter().filter(|(_, v)| scalar(v).is_some()).map(|(k, _)| k))
        .collect();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec!["p".to_string(), "status".into(), "violations".into(), "first_violation".into()];
    header.extend(keys.iter().map(|k| k.to_string()));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        let status = serde_json::to_value(r.status).expect("serializable");
        let first = r.violations.first().map(|v| format!("{}: {}", v.check, v.detail)).unwrap_or_default();
        let mut row = vec![r.p.to_string(), scalar(&status).unwrap_or_default(), r.violations.len().to_string(), first];
        for k in &keys {
            row.push(r.data.get(k.as_str()).and_then(scalar).unwrap_or_default());
        }
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

const TRACE_FIELDS: [&str; 7] = ["h1", "h1_ambient", "h2", "sigma", "t", "cz_bound", "trivial_bound"];

/// The largest count over the sampled σ for each subgroup pair.
pub fn write_trace_csv(path: &Path, rows: &[&Record]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec!["p"];
    header.extend(TRACE_FIELDS);
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        let Some(worst) = r.data.get("trace_worst").and_then(Value::as_array) else { continue };
        for entry in worst {
            let mut row = vec![r.p.to_string()];
            row.extend(TRACE_FIELDS.iter().map(|f| entry.get(*f).and_then(scalar).unwrap_or_default()));
            w.write_record(&row).map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
