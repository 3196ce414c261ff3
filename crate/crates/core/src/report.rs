//! Verification reports and the deterministic sampling harness behind them.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::scalars::{sample_rng, Ring, Scalar};

/// How many random elements to try, from which seed, with coordinates drawn
/// from `[-bound, bound]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub samples: usize,
    pub seed: u64,
    pub bound: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { samples: 200, seed: 42, bound: 10 }
    }
}

impl SampleConfig {
    pub fn with_samples(self, samples: usize) -> Self {
        SampleConfig { samples, ..self }
    }
}

/// A concrete input on which an identity failed.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<u64>,
    pub inputs: Vec<(String, Value)>,
    pub detail: String,
}

impl Witness {
    pub fn new(sample: Option<u64>, detail: impl Into<String>) -> Self {
        Witness { sample, inputs: Vec::new(), detail: detail.into() }
    }

    pub fn with(mut self, name: &str, v: &[Scalar]) -> Self {
        self.inputs.push((name.to_string(), Value::Array(v.iter().map(Scalar::to_json).collect())));
        self
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl CheckResult {
    pub fn exact(name: &str, witness: Option<Witness>) -> Self {
        CheckResult { name: name.to_string(), passed: witness.is_none(), samples: 0, witness }
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Report {
    pub subject: String,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report { subject: subject.into(), checks: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The first failing check's witness, if any.
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Run `f` on sample indices `0..samples` and report the lowest failing index.
/// Each index gets its own RNG stream, so the result does not depend on how
/// the work is scheduled.
pub fn sampled<F>(name: &str, cfg: &SampleConfig, f: F) -> CheckResult
where
    F: Fn(u64, &mut ChaCha8Rng) -> Option<Witness> + Sync,
{
    let witness = (0..cfg.samples as u64).into_par_iter().find_map_first(|i| {
        let mut rng = sample_rng(cfg.seed, i);
        f(i, &mut rng).map(|mut w| {
            w.sample = Some(i);
            w
        })
    });
    CheckResult { name: name.to_string(), passed: witness.is_none(), samples: cfg.samples, witness }
}

/// Draw an element of `R^n` from a sample stream.
pub fn random_element(ring: &Ring, n: usize, rng: &mut ChaCha8Rng, bound: u64) -> Vec<Scalar> {
    (0..n).map(|_| ring.random(rng, bound)).collect()
}

/// Size the global worker pool from `JAF_THREADS`, if set. Safe to call more
/// than once.
pub fn init_threads_from_env() {
    if let Some(n) = std::env::var("JAF_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}
