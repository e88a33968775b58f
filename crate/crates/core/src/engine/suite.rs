use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    compare_mgf, empirical_mgf, ks_critical_value, ks_two_sample, log_moment_check, TestKind,
    TestResult,
};
use crate::catalog::{expand_cases, sample_side, IdentityId, IdentitySpec, Side, TestPlan};
use crate::error::{domain, Error, Result};
use crate::oracle::i7_logmgf_identity;
use crate::rng::RngStream;

/// MGF grid for the Laplace-valued identities. `exp(tL)` has a finite
/// variance only for `|t| < 1/2`.
pub const BAND_GRID_LAPLACE: [f64; 6] = [-0.45, -0.3, -0.15, 0.15, 0.3, 0.45];

/// Power-moment grid for I7, inside `k/2 + t > 0` for every `k >= 1`.
pub const LOG_MOMENT_GRID: [f64; 7] = [-0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4];

pub const MIN_SAMPLE_SIZE: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub master_seed: u64,
    pub n: usize,
    pub replicates: u32,
    pub alpha: f64,
    pub identities: Vec<IdentityId>,
    pub i7_k_values: Vec<u32>,
    pub i8_n_values: Vec<u32>,
    /// Half-width, in standard errors, of the MGF and log-moment bands.
    pub band_z: f64,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    /// Wall-clock timings make reports non-reproducible, so they are opt-in.
    pub record_timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            n: 100_000,
            replicates: 20,
            alpha: 0.001,
            identities: IdentityId::ALL.to_vec(),
            i7_k_values: IdentityId::I7.default_params().to_vec(),
            i8_n_values: IdentityId::I8.default_params().to_vec(),
            band_z: 6.0,
            output_format: OutputFormat::Json,
            output_path: None,
            record_timings: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_SAMPLE_SIZE {
            return Err(Error::Config(format!(
                "n must be at least {MIN_SAMPLE_SIZE}, got {}",
                self.n
            )));
        }
        if self.replicates < 1 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.band_z > 0.0) || !self.band_z.is_finite() {
            return Err(Error::Config(format!("band_z must be positive, got {}", self.band_z)));
        }
        if self.identities.is_empty() {
            return Err(Error::Config("no identities selected".into()));
        }
        self.cases().map(|_| ())
    }

    /// Concrete identity cases in report order.
    pub fn cases(&self) -> Result<Vec<IdentitySpec>> {
        let mut ids = self.identities.clone();
        ids.sort();
        ids.dedup();
        expand_cases(&ids, &self.i7_k_values, &self.i8_n_values)
    }
}

/// One test of one replicate of one identity case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub identity: String,
    pub replicate: u32,
    pub test_kind: TestKind,
    pub statistic: f64,
    pub threshold: f64,
    pub p_value: Option<f64>,
    pub passed: bool,
    /// Threshold at the Bonferroni-adjusted level `alpha / tests_run`.
    pub adjusted_threshold: f64,
    pub passed_adjusted: bool,
    pub metadata: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySummary {
    pub identity: String,
    pub citation: String,
    pub test_plan: TestPlan,
    pub replicates: u32,
    /// Replicates in which every test passed at the unadjusted level.
    pub passed_replicates: u32,
    pub pass_fraction: f64,
    pub passed_adjusted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub version: String,
    pub config: SuiteConfig,
    pub results: Vec<ResultEntry>,
    pub identities: Vec<IdentitySummary>,
    pub tests_run: usize,
    pub bonferroni_alpha: f64,
    pub aggregate_pass: bool,
    /// Seconds of work per identity case; empty unless `record_timings` is set.
    pub timings: BTreeMap<String, f64>,
}

impl EquivalenceReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn summary(&self, identity: &str) -> Option<&IdentitySummary> {
        self.identities.iter().find(|s| s.identity == identity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

pub fn run_identity_suite(config: &SuiteConfig) -> Result<EquivalenceReport> {
    run_identity_suite_with(config, Execution::Parallel)
}

struct UnitOutcome {
    case: usize,
    replicate: u32,
    results: Vec<TestResult>,
    seconds: f64,
}

/// Runs every selected case for every replicate. The report depends only on
/// `config`: units own their streams and results are merged in
/// `(case, replicate, test)` order regardless of scheduling.
pub fn run_identity_suite_with(
    config: &SuiteConfig,
    execution: Execution,
) -> Result<EquivalenceReport> {
    config.validate()?;
    let cases = config.cases()?;
    let units: Vec<(usize, u32)> = (0..cases.len())
        .flat_map(|c| (0..config.replicates).map(move |r| (c, r)))
        .collect();
    let run = |&(case, replicate): &(usize, u32)| -> Result<UnitOutcome> {
        let start = Instant::now();
        let results = run_unit(&cases[case], replicate, config)?;
        Ok(UnitOutcome {
            case,
            replicate,
            results,
            seconds: start.elapsed().as_secs_f64(),
        })
    };
    let outcomes: Vec<UnitOutcome> = match execution {
        Execution::Serial => units.iter().map(run).collect::<Result<_>>()?,
        Execution::Parallel => units.par_iter().map(run).collect::<Result<_>>()?,
    };

    let tests_run: usize = outcomes.iter().map(|o| o.results.len()).sum();
    let bonferroni_alpha = config.alpha / tests_run as f64;

    let mut results = Vec::with_capacity(tests_run);
    let mut passed_replicates = vec![0u32; cases.len()];
    let mut adjusted_ok = vec![true; cases.len()];
    let mut timings = BTreeMap::new();
    for outcome in &outcomes {
        let label = cases[outcome.case].label();
        if outcome.results.iter().all(|r| r.passed) {
            passed_replicates[outcome.case] += 1;
        }
        if config.record_timings {
            *timings.entry(label.clone()).or_insert(0.0) += outcome.seconds;
        }
        for r in &outcome.results {
            let adjusted_threshold = match r.test_kind {
                TestKind::Ks => ks_critical_value(bonferroni_alpha, config.n, config.n)?,
                _ => r.threshold,
            };
            let passed_adjusted = r.statistic <= adjusted_threshold;
            adjusted_ok[outcome.case] &= passed_adjusted;
            results.push(ResultEntry {
                identity: label.clone(),
                replicate: outcome.replicate,
                test_kind: r.test_kind,
                statistic: r.statistic,
                threshold: r.threshold,
                p_value: r.p_value,
                passed: r.passed,
                adjusted_threshold,
                passed_adjusted,
                metadata: r.metadata.clone(),
            });
        }
    }

    let identities: Vec<IdentitySummary> = cases
        .iter()
        .enumerate()
        .map(|(i, case)| IdentitySummary {
            identity: case.label(),
            citation: case.citation().to_string(),
            test_plan: case.test_plan(),
            replicates: config.replicates,
            passed_replicates: passed_replicates[i],
            pass_fraction: passed_replicates[i] as f64 / config.replicates as f64,
            passed_adjusted: adjusted_ok[i],
        })
        .collect();
    let aggregate_pass = results.iter().all(|r| r.passed_adjusted);

    Ok(EquivalenceReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        results,
        identities,
        tests_run,
        bonferroni_alpha,
        aggregate_pass,
        timings,
    })
}

fn run_unit(case: &IdentitySpec, replicate: u32, config: &SuiteConfig) -> Result<Vec<TestResult>> {
    let label = case.label();
    let stream = |side: Side| {
        RngStream::for_replicate(config.master_seed, &label, side.as_str(), replicate)
    };
    let lhs = sample_side(case, Side::Lhs, &stream(Side::Lhs), config.n)?;
    let rhs = sample_side(case, Side::Rhs, &stream(Side::Rhs), config.n)?;

    let mut out = vec![ks_two_sample(&lhs, &rhs, config.alpha)?];
    match case.test_plan() {
        TestPlan::Ks => {}
        TestPlan::KsMgf => {
            let analytic = |t: f64| {
                case.analytic_mgf(t)
                    .ok_or_else(|| domain("MGF grid point outside the analytic domain", t))
            };
            let l = compare_mgf(&empirical_mgf(&lhs, &BAND_GRID_LAPLACE)?, analytic, config.band_z)?;
            let r = compare_mgf(&empirical_mgf(&rhs, &BAND_GRID_LAPLACE)?, analytic, config.band_z)?;
            let metadata = BTreeMap::from([
                ("z".to_string(), json!(config.band_z)),
                ("grid".to_string(), json!(BAND_GRID_LAPLACE)),
                ("lhs".to_string(), json!(l.metadata)),
                ("rhs".to_string(), json!(r.metadata)),
            ]);
            out.push(TestResult::new(
                TestKind::MgfGrid,
                l.statistic.max(r.statistic),
                config.band_z,
                None,
                metadata,
            ));
        }
        TestPlan::KsLogMoment => {
            let mut r = log_moment_check(&lhs, &rhs, &LOG_MOMENT_GRID, config.band_z)?;
            let k = case.param.unwrap_or(1);
            let analytic = LOG_MOMENT_GRID
                .iter()
                .map(|&t| i7_logmgf_identity(k, t).map(|(l, _)| l))
                .collect::<Result<Vec<f64>>>()?;
            r.metadata.insert("analytic".to_string(), json!(analytic));
            out.push(r);
        }
    }
    Ok(out)
}
