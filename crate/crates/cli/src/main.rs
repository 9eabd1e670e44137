use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use markoff_core::cyclo::no_finite_orbit_sweep;
use markoff_core::stepanov::build_aux_poly;
use markoff_core::{PrimeContext, StepanovInstance};
use markoff_cli::runner::write_jsonl;
use markoff_cli::{report_merge, run, CliError, PrimeRange, RunConfig, RunReport, Status, Suite};

#[derive(Parser)]
#[command(name = "markoff", version, about = "Verification suites for the Markoff surface mod p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Inclusive prime range, `a..b`.
    #[arg(long, default_value = "5..101")]
    primes: PrimeRange,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Factorization cache file, read if present and rewritten after the run.
    #[arg(long, env = "MARKOFF_FACTOR_CACHE")]
    cache: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Run several suites over one prime range.
    Run {
        #[arg(long, value_delimiter = ',', default_values_t = Suite::ALL.to_vec())]
        suites: Vec<Suite>,
        #[command(flatten)]
        common: Common,
    },
    /// Count points and compare with the closed form.
    Enumerate(Common),
    /// Orbit partition under the Vieta moves.
    Components(Common),
    /// Incidence graph of conic slices.
    Incidence(Common),
    /// Connectivity of the cage.
    Cage(Common),
    /// Subgroup and curve point counts.
    Counting(Common),
    /// Auxiliary polynomial checks, or a single instance with `--instance`.
    Stepanov {
        /// JSON instance file; builds one auxiliary polynomial and prints it.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Order lower bound from the orbit data.
    Opening(Common),
    /// Smoothness classification of p^2 - 1.
    Smoothness(Common),
    /// Certify that no root-of-unity triple up to `l_max` makes eta vanish
    /// outside the trivial family.
    EtaSweep {
        #[arg(long, default_value_t = 24)]
        l_max: u64,
    },
    /// Merge JSONL outputs; later files win on duplicate `(suite, p)`.
    Merge {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Merged JSONL destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn config(common: Common, suites: Vec<Suite>) -> RunConfig {
    RunConfig {
        primes: common.primes,
        suites,
        workers: common.workers,
        out_dir: common.out,
        cache: common.cache,
        seed: common.seed,
    }
}

fn summarize(report: &RunReport) -> ExitCode {
    let count = |s: Status| report.records.iter().filter(|r| r.status == s).count();
    eprintln!(
        "{} records: {} pass, {} fail, {} unsupported, {} violations",
        report.records.len(),
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Unsupported),
        report.violation_count(),
    );
    for r in report.records.iter().filter(|r| r.status == Status::Fail) {
        for v in &r.violations {
            eprintln!("  {} p={} {}: {}", r.suite, r.p, v.check, v.detail);
        }
    }
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Parse(e.to_string()))?;
    writeln!(io::stdout(), "{s}").map_err(|e| CliError::io(&PathBuf::from("<stdout>"), e))
}

fn run_instance(path: &PathBuf) -> Result<ExitCode, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let inst: StepanovInstance =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let ctx = PrimeContext::new(inst.p)?;
    let aux = build_aux_poly(&inst.spec(), &inst.params(), &ctx)?;
    print_json(&aux)?;
    Ok(if aux.vanishing_ok && aux.bound_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    let single = |suite: Suite, common: Common| run(&config(common, vec![suite])).map(|r| summarize(&r));
    match cli.command {
        Command::Run { suites, common } => run(&config(common, suites)).map(|r| summarize(&r)),
        Command::Enumerate(c) => single(Suite::Enumerate, c),
        Command::Components(c) => single(Suite::Components, c),
        Command::Incidence(c) => single(Suite::Incidence, c),
        Command::Cage(c) => single(Suite::Cage, c),
        Command::Counting(c) => single(Suite::Counting, c),
        Command::Stepanov { instance: Some(path), .. } => run_instance(&path),
        Command::Stepanov { instance: None, common } => single(Suite::Stepanov, common),
        Command::Opening(c) => single(Suite::Opening, c),
        Command::Smoothness(c) => single(Suite::Smoothness, c),
        Command::EtaSweep { l_max } => {
            let r = no_finite_orbit_sweep(l_max)?;
            print_json(&r)?;
            Ok(if r.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Merge { files, out } => {
            let report = report_merge(&files)?;
            let rows: Vec<_> = report.records.iter().collect();
            match out {
                Some(path) => {
                    write_jsonl(&path, &rows)?;
                    eprintln!("wrote {}", path.display());
                }
                None => {
                    let mut stdout = io::stdout().lock();
                    for r in rows {
                        let line = serde_json::to_string(r).map_err(|e| CliError::Parse(e.to_string()))?;
                        writeln!(stdout, "{line}").map_err(|e| CliError::io(&PathBuf::from("<stdout>"), e))?;
                    }
                }
            }
            Ok(summarize(&RunReport { files: Vec::new(), ..report }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
