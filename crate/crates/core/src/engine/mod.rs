//! Two-sample and closed-form equivalence checks, and the suite runner.

mod ks;
mod mgf;
mod moments;
mod suite;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use ks::{ks_critical_value, ks_statistic, ks_two_sample, kolmogorov_survival};
pub use mgf::{compare_mgf, empirical_log_mgf, empirical_mgf, log_moment_check, MgfCurve};
pub use moments::moment_check;
pub use suite::{
    run_identity_suite, run_identity_suite_with, EquivalenceReport, Execution, IdentitySummary,
    OutputFormat, ResultEntry, SuiteConfig, BAND_GRID_LAPLACE, LOG_MOMENT_GRID,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestKind {
    #[serde(rename = "KS")]
    Ks,
    #[serde(rename = "MGFGrid")]
    MgfGrid,
    Moment,
    LogMoment,
}

impl std::fmt::Display for TestKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TestKind::Ks => "KS",
            TestKind::MgfGrid => "MGFGrid",
            TestKind::Moment => "Moment",
            TestKind::LogMoment => "LogMoment",
        })
    }
}

/// Outcome of one check. `passed` is always `statistic <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test_kind: TestKind,
    pub statistic: f64,
    pub threshold: f64,
    pub p_value: Option<f64>,
    pub passed: bool,
    pub metadata: BTreeMap<String, Value>,
}

impl TestResult {
    fn new(
        test_kind: TestKind,
        statistic: f64,
        threshold: f64,
        p_value: Option<f64>,
        metadata: BTreeMap<String, Value>,
    ) -> Self {
        Self {
            test_kind,
            statistic,
            threshold,
            p_value,
            passed: statistic <= threshold,
            metadata,
        }
    }
}

/// Stand-in statistic for a deviation measured against a zero standard
/// error; finite so that reports stay valid JSON.
pub const DEGENERATE_STATISTIC: f64 = f64::MAX;

/// `|deviation| / standard_error`, with `0/0 = 0` and `x/0 = DEGENERATE_STATISTIC`.
pub(crate) fn band_score(deviation: f64, standard_error: f64) -> f64 {
    let dev = deviation.abs();
    if standard_error > 0.0 {
        (dev / standard_error).min(DEGENERATE_STATISTIC)
    } else if dev == 0.0 {
        0.0
    } else {
        DEGENERATE_STATISTIC
    }
}

pub(crate) fn check_band_width(z: f64) -> crate::Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(crate::error::domain("band width z (needs z > 0)", z));
    }
    Ok(())
}
