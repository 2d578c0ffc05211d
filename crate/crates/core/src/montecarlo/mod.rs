//! The sampling harness: draws `m` graphs from a model, classifies each one
//! and folds the results into a [`TallySheet`].

mod stats;
mod tally;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use stats::{ci, ci_report, compare, consistent, sylow_theory, theory_map, Ci, CiReport, Comparison, Z99};
pub use tally::{PrimeTally, SampleRecord, TallySheet};

use crate::arith::is_prime_u64;
use crate::error::{invalid, Error, Result};
use crate::graphgen::{ModelSpec, SeedSpec};
use crate::invariants::compute_invariant;

/// Samples handed to the thread pool at a time.
const BLOCK: u64 = 4096;

/// Thread count for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    #[default]
    Auto,
    Count(usize),
}

impl Workers {
    fn threads(self) -> usize {
        match self {
            Workers::Auto => 0,
            Workers::Count(k) => k,
        }
    }
}

impl fmt::Display for Workers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Workers::Auto => f.write_str("auto"),
            Workers::Count(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for Workers {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "auto" {
            return Ok(Workers::Auto);
        }
        match s.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Workers::Count(k)),
            _ => invalid(format!("workers must be a positive integer or \"auto\", got {s:?}")),
        }
    }
}

impl Serialize for Workers {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Workers::Auto => s.serialize_str("auto"),
            Workers::Count(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Workers {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(k) => Workers::from_str(&k.to_string()),
            Raw::S(s) => Workers::from_str(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

fn default_primes() -> Vec<u64> {
    vec![2, 3, 5, 7]
}

fn default_max_exp() -> u32 {
    3
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub samples: u64,
    pub master_seed: u64,
    #[serde(default = "default_primes")]
    pub primes: Vec<u64>,
    #[serde(default = "default_max_exp")]
    pub max_exp: u32,
    #[serde(default)]
    pub workers: Workers,
    #[serde(default)]
    pub emit_raw: bool,
}

impl RunConfig {
    pub fn new(model: ModelSpec, samples: u64, master_seed: u64) -> Self {
        RunConfig {
            model,
            samples,
            master_seed,
            primes: default_primes(),
            max_exp: default_max_exp(),
            workers: Workers::Auto,
            emit_raw: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.samples == 0 {
            return invalid("sample count must be at least 1");
        }
        if let Some(p) = self.primes.iter().find(|&&p| !is_prime_u64(p)) {
            return invalid(format!("{p} is not prime"));
        }
        let mut sorted = self.primes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.primes.len() {
            return invalid("primes must be distinct");
        }
        Ok(())
    }
}

/// Result of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub tally: TallySheet,
    pub cis: CiReport,
    pub comparison: Vec<Comparison>,
}

/// Classifies sample `index` of a run, checking internal consistency.
pub fn sample(config: &RunConfig, index: u64) -> Result<SampleRecord> {
    let fail = |msg: String| Error::Assertion {
        seed: config.master_seed,
        index,
        msg,
    };
    let a = config
        .model
        .generate(SeedSpec::new(config.master_seed, index))
        .map_err(|e| fail(e.to_string()))?;
    let inv = compute_invariant(&a);
    inv.self_check().map_err(fail)?;
    let sylow = inv
        .sylow_profile(&config.primes, config.max_exp)
        .map_err(|e| fail(e.to_string()))?;
    Ok(SampleRecord::new(index, inv, sylow))
}

/// Runs `config`, handing every record to `sink` in index order.
pub fn run_with_sink<F>(config: &RunConfig, mut sink: F) -> Result<RunOutput>
where
    F: FnMut(&SampleRecord) -> Result<()>,
{
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.threads())
        .build()
        .map_err(|e| Error::Io(format!("cannot start worker pool: {e}")))?;
    let mut tally = TallySheet::new(&config.primes);
    let mut start = 0;
    while start < config.samples {
        let end = (start + BLOCK).min(config.samples);
        let block: Vec<Result<SampleRecord>> =
            pool.install(|| (start..end).into_par_iter().map(|i| sample(config, i)).collect());
        for rec in block {
            let rec = rec?;
            tally.add(&rec);
            sink(&rec)?;
        }
        start = end;
    }
    tally.check_relations().map_err(|msg| Error::Assertion {
        seed: config.master_seed,
        index: config.samples,
        msg,
    })?;
    let cis = ci_report(&tally)?;
    let comparison = compare(&tally, &cis, &config.model, config.max_exp);
    Ok(RunOutput {
        tally,
        cis,
        comparison,
    })
}

pub fn run(config: &RunConfig) -> Result<RunOutput> {
    run_with_sink(config, |_| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_model_gives_clamped_intervals() {
        let cfg = RunConfig::new(ModelSpec::CuntzPolygon { mbar: vec![3] }, 10, 0);
        let out = run(&cfg).unwrap();
        assert_eq!(out.tally.exact_cuntz, 10);
        for c in out.cis.values() {
            assert_eq!(c.half_width, 0.0);
            assert!(c.p_hat == 0.0 || c.p_hat == 1.0);
        }
    }

    #[test]
    fn workers_parse() {
        assert_eq!("auto".parse::<Workers>().unwrap(), Workers::Auto);
        assert_eq!("4".parse::<Workers>().unwrap(), Workers::Count(4));
        assert!("0".parse::<Workers>().is_err());
        let w: Workers = serde_json::from_str("8").unwrap();
        assert_eq!(w, Workers::Count(8));
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::new(ModelSpec::RegularMatchings { n: 7, r: 3 }, 10, 0);
        assert!(cfg.validate().is_err());
        cfg.model = ModelSpec::RegularMatchings { n: 8, r: 3 };
        cfg.primes = vec![2, 4];
        assert!(cfg.validate().is_err());
        cfg.primes = vec![2, 3];
        cfg.samples = 0;
        assert!(cfg.validate().is_err());
    }
}
