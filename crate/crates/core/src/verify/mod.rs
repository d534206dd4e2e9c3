//! Named check suites over fixed parameter grids, and their JSON report.
//!
//! Every suite checks one quantitative statement at finitely many levels and
//! records one case per grid point. Randomized cases draw from a ChaCha
//! stream seeded by the grid seed and the suite's position, so a report is
//! reproducible from its seed and grid.

mod config;
mod group;
mod normalizer;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::{Error, Result};

pub use config::{
    BlocksGrid, ClassificationGrid, ConjugacyGrid, ConjugationGrid, CountingGrid, CriterionGrid,
    DensityGrid, GridConfig, GroupGrid, SignGrid, SquareGrid, TrivialityGrid, DEFAULT_GRID,
    GRID_VERSION,
};
pub use group::{
    suite_blocks_and_estimates, suite_counting_laws, suite_density, suite_group_g,
    suite_stable_criterion,
};
pub use normalizer::{
    suite_classification, suite_conjugacy_classes, suite_conjugation, suite_sign_lemma,
    suite_square_law, suite_triviality,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Case {
    pub params: Value,
    pub verdict: Verdict,
    /// What went wrong, with the smallest failing parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    /// The statement being checked.
    pub statement: String,
    pub grid: Value,
    pub cases: Vec<Case>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl SuiteResult {
    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| c.verdict == Verdict::Fail)
    }
}

/// Accumulates the cases of one suite.
pub(crate) struct Suite {
    name: &'static str,
    statement: &'static str,
    grid: Value,
    cases: Vec<Case>,
}

impl Suite {
    pub(crate) fn new(name: &'static str, statement: &'static str, grid: Value) -> Suite {
        Suite {
            name,
            statement,
            grid,
            cases: Vec::new(),
        }
    }

    /// Runs one case; `Ok(None)` passes, `Ok(Some(_))` and errors fail.
    pub(crate) fn case(&mut self, params: Value, check: impl FnOnce() -> Result<Option<Value>>) {
        let (verdict, counterexample) = match check() {
            Ok(None) => (Verdict::Pass, None),
            Ok(Some(c)) => (Verdict::Fail, Some(c)),
            Err(e) => (Verdict::Fail, Some(Value::String(format!("error: {e}")))),
        };
        self.cases.push(Case {
            params,
            verdict,
            counterexample,
        });
    }

    pub(crate) fn finish(self) -> SuiteResult {
        let passed = self.cases.iter().all(|c| c.verdict == Verdict::Pass);
        SuiteResult {
            name: self.name.to_string(),
            statement: self.statement.to_string(),
            grid: self.grid,
            cases: self.cases,
            passed,
            wall_time_ms: None,
        }
    }
}

type SuiteFn = fn(&GridConfig, &mut ChaCha8Rng) -> SuiteResult;

/// Suites in report order.
pub const SUITE_NAMES: [&str; 11] = [
    "conjugation",
    "sign_lemma",
    "triviality",
    "square_law",
    "classification",
    "conjugacy_classes",
    "group_g",
    "blocks_and_estimates",
    "density",
    "stable_criterion",
    "counting_laws",
];

const SUITES: [SuiteFn; 11] = [
    suite_conjugation,
    suite_sign_lemma,
    suite_triviality,
    suite_square_law,
    suite_classification,
    suite_conjugacy_classes,
    suite_group_g,
    suite_blocks_and_estimates,
    suite_density,
    suite_stable_criterion,
    suite_counting_laws,
];

/// The random stream of the suite at `index`.
pub fn suite_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Runs one suite by name (case-insensitive).
pub fn run_suite(name: &str, cfg: &GridConfig) -> Result<SuiteResult> {
    let index = SUITE_NAMES
        .iter()
        .position(|s| s.eq_ignore_ascii_case(name))
        .ok_or_else(|| {
            Error::Precondition(format!(
                "unknown suite '{name}'; known suites: {}",
                SUITE_NAMES.join(", ")
            ))
        })?;
    Ok(SUITES[index](cfg, &mut suite_rng(cfg.seed, index)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: u32,
    pub seed: u64,
    pub grid_hash: String,
    pub grid: GridConfig,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

/// Runs the named suites (all when `only` is empty). Wall times are only
/// recorded with `timings`, which keeps reports byte-identical otherwise.
pub fn run_harness(cfg: &GridConfig, only: &[String], timings: bool) -> Result<Report> {
    let mut picked: Vec<usize> = Vec::new();
    for name in only {
        let i = SUITE_NAMES
            .iter()
            .position(|s| s.eq_ignore_ascii_case(name))
            .ok_or_else(|| {
                Error::Precondition(format!(
                    "unknown suite '{name}'; known suites: {}",
                    SUITE_NAMES.join(", ")
                ))
            })?;
        if !picked.contains(&i) {
            picked.push(i);
        }
    }
    if picked.is_empty() {
        picked = (0..SUITES.len()).collect();
    }
    picked.sort_unstable();
    let suites: Vec<SuiteResult> = picked
        .into_iter()
        .map(|i| {
            let start = Instant::now();
            let mut res = SUITES[i](cfg, &mut suite_rng(cfg.seed, i));
            if timings {
                res.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            res
        })
        .collect();
    let passed = suites.iter().all(|s| s.passed);
    Ok(Report {
        version: GRID_VERSION,
        seed: cfg.seed,
        grid_hash: cfg.hash(),
        grid: cfg.clone(),
        suites,
        passed,
    })
}

/// Smallest element of `xs` failing `ok`, for counterexample payloads.
pub(crate) fn first_failure<T: Copy>(
    xs: impl IntoIterator<Item = T>,
    mut ok: impl FnMut(T) -> Result<bool>,
) -> Result<Option<T>> {
    for x in xs {
        if !ok(x)? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        let cfg = GridConfig::default();
        assert!(run_suite("nope", &cfg).is_err());
        assert!(run_harness(&cfg, &["nope".into()], false).is_err());
    }

    #[test]
    fn small_harness_is_deterministic() {
        let cfg = GridConfig::default().with_max_level(5);
        let only = vec!["conjugation".to_string(), "Triviality".to_string()];
        let a = run_harness(&cfg, &only, false).unwrap();
        let b = run_harness(&cfg, &only, false).unwrap();
        assert!(a.passed);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.suites.len(), 2);
        assert!(a.suites[0].wall_time_ms.is_none());
    }
}
