//! Bound-verification harness: named suites of checks run on generated
//! instances, reported as machine-readable results.

mod suites;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const REPORT_VERSION: u32 = 1;

/// Theorem-backed checks fail the run; reported checks carry a quantity
/// whose constant is unspecified and never fail it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    TheoremBacked,
    Reported,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    /// The mathematical statement this check instantiates.
    pub statement: String,
    pub instance_descriptor: String,
    pub claimed_bound: Value,
    pub observed: Value,
    pub pass: bool,
    pub runtime_ms: u64,
    pub kind: CheckKind,
}

impl CheckResult {
    pub fn is_fatal(&self) -> bool {
        self.kind == CheckKind::TheoremBacked && !self.pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub report_version: u32,
    pub seed: u64,
    pub suites: Vec<String>,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn fatal_count(&self) -> usize {
        self.checks.iter().filter(|c| c.is_fatal()).count()
    }

    pub fn passed(&self) -> bool {
        self.fatal_count() == 0
    }
}

/// What a single check computed: the bound, the observation, and whether
/// the observation satisfies the bound.
pub(crate) struct Outcome {
    pub claimed: Value,
    pub observed: Value,
    pub pass: bool,
}

impl Outcome {
    pub fn new(claimed: impl Into<Value>, observed: impl Into<Value>, pass: bool) -> Self {
        Self { claimed: claimed.into(), observed: observed.into(), pass }
    }
}

/// One check description, evaluated lazily so it can be timed and run in
/// parallel.
pub(crate) struct CheckDef<'a> {
    pub name: &'static str,
    pub statement: &'static str,
    pub kind: CheckKind,
    pub descriptor: String,
    pub run: Box<dyn Fn() -> Result<Outcome> + Send + Sync + 'a>,
}

impl<'a> CheckDef<'a> {
    pub fn theorem(
        name: &'static str,
        statement: &'static str,
        descriptor: impl Into<String>,
        run: impl Fn() -> Result<Outcome> + Send + Sync + 'a,
    ) -> Self {
        Self { name, statement, kind: CheckKind::TheoremBacked, descriptor: descriptor.into(), run: Box::new(run) }
    }

    pub fn reported(
        name: &'static str,
        statement: &'static str,
        descriptor: impl Into<String>,
        run: impl Fn() -> Result<Outcome> + Send + Sync + 'a,
    ) -> Self {
        Self { name, statement, kind: CheckKind::Reported, descriptor: descriptor.into(), run: Box::new(run) }
    }
}

pub(crate) fn evaluate(suite: &str, defs: Vec<CheckDef<'_>>) -> Vec<CheckResult> {
    defs
        .into_par_iter()
        .map(|s| {
            let start = Instant::now();
            let outcome = (s.run)();
            let runtime_ms = start.elapsed().as_millis() as u64;
            let (claimed_bound, observed, pass) = match outcome {
                Ok(o) => (o.claimed, o.observed, o.pass),
                Err(e) => (Value::String("n/a".into()), Value::String(format!("error: {e}")), false),
            };
            CheckResult {
                suite: suite.to_string(),
                name: s.name.to_string(),
                statement: s.statement.to_string(),
                instance_descriptor: s.descriptor,
                claimed_bound,
                observed,
                pass,
                runtime_ms,
                kind: s.kind,
            }
        })
        .collect()
}

type SuiteFn = fn(u64) -> Vec<CheckResult>;

/// Registered suites, in report order.
pub const SUITES: &[(&str, SuiteFn)] = &[
    ("kappa-equivalence", suites::kappa_equivalence),
    ("half-circle", suites::half_circle),
    ("incidence-complete", suites::incidence_complete),
    ("kappa-2d", suites::kappa_2d),
    ("condition-chain", suites::condition_chain),
    ("projection", suites::projection),
    ("sylvester-gallai", suites::sylvester_gallai),
    ("minor-chain", suites::minor_chain),
    ("main-kappa", suites::main_kappa),
    ("complex-rep", suites::complex_rep),
    ("complex-kappa", suites::complex_kappa),
    ("dowling", suites::dowling),
    ("ordinary-flats", suites::ordinary_flats),
    ("design-rank", suites::design_rank),
    ("scaling", suites::scaling),
    ("graver", suites::graver),
    ("proximity", suites::proximity),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Resolves `all` and validates every name before running anything.
pub fn resolve_suites(names: &[String]) -> Result<Vec<&'static str>> {
    if names.iter().any(|n| n == "all") {
        return Ok(suite_names());
    }
    names
        .iter()
        .map(|n| {
            SUITES
                .iter()
                .find(|(s, _)| s == n)
                .map(|(s, _)| *s)
                .ok_or_else(|| Error::Precondition(format!("unknown suite {n:?}; known: {}", suite_names().join(", "))))
        })
        .collect()
}

/// Runs the named suites in parallel. Results keep registration order
/// within each suite and the requested order across suites.
pub fn verify_suite(names: &[String], seed: u64) -> Result<Report> {
    let resolved = resolve_suites(names)?;
    let checks: Vec<Vec<CheckResult>> = resolved
        .par_iter()
        .map(|name| {
            let f = SUITES.iter().find(|(s, _)| s == name).expect("resolved").1;
            f(seed)
        })
        .collect();
    Ok(Report {
        report_version: REPORT_VERSION,
        seed,
        suites: resolved.iter().map(|s| s.to_string()).collect(),
        checks: checks.into_iter().flatten().collect(),
    })
}
