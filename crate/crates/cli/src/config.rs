use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Enumerate,
    Components,
    Incidence,
    Cage,
    Counting,
    Stepanov,
    Opening,
    Smoothness,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Enumerate,
        Suite::Components,
        Suite::Incidence,
        Suite::Cage,
        Suite::Counting,
        Suite::Stepanov,
        Suite::Opening,
        Suite::Smoothness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Enumerate => "enumerate",
            Suite::Components => "components",
            Suite::Incidence => "incidence",
            Suite::Cage => "cage",
            Suite::Counting => "counting",
            Suite::Stepanov => "stepanov",
            Suite::Opening => "opening",
            Suite::Smoothness => "smoothness",
        }
    }

    /// Suites that only need the solution set and so also run at `p = 3`.
    pub fn runs_at_three(self) -> bool {
        matches!(self, Suite::Enumerate | Suite::Components)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive range written `a..b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRange {
    pub min: u64,
    pub max: u64,
}

impl FromStr for PrimeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
        let parse = |v: &str| v.trim().parse::<u64>().map_err(|e| format!("{v:?}: {e}"));
        Ok(PrimeRange { min: parse(a)?, max: parse(b)? })
    }
}

impl PrimeRange {
    pub fn primes(&self) -> Vec<u64> {
        (self.min..=self.max).filter(|&p| markoff_core::ff::is_prime(p)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub primes: PrimeRange,
    pub suites: Vec<Suite>,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub cache: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.primes.min < 3 {
            return Err(CliError::Config(format!("prime range must start at 3 or above, got {}", self.primes.min)));
        }
        if self.workers == 0 {
            return Err(CliError::Config("worker count must be at least 1".into()));
        }
        if self.suites.is_empty() {
            return Err(CliError::Config("no suites selected".into()));
        }
        Ok(())
    }
}
