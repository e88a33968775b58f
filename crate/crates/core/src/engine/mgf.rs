use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{band_score, check_band_width, TestKind, TestResult};
use crate::dist::SampleBatch;
use crate::error::{domain, Error, Result};

/// Sample means of `exp(t x)` over a grid of `t`, with their standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgfCurve {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub standard_errors: Vec<f64>,
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(domain("MGF grid length", 0.0));
    }
    if let Some(&t) = t_grid.iter().find(|t| !t.is_finite()) {
        return Err(domain("MGF grid point", t));
    }
    Ok(())
}

fn mean_and_se(values: &[f64], t_grid: &[f64]) -> Result<MgfCurve> {
    let n = values.len() as f64;
    let mut curve = MgfCurve {
        t_grid: t_grid.to_vec(),
        values: Vec::with_capacity(t_grid.len()),
        standard_errors: Vec::with_capacity(t_grid.len()),
    };
    for &t in t_grid {
        if t == 0.0 {
            curve.values.push(1.0);
            curve.standard_errors.push(0.0);
            continue;
        }
        let terms: Vec<f64> = values.iter().map(|&x| (t * x).exp()).collect();
        if terms.iter().any(|e| !e.is_finite()) {
            return Err(Error::MgfOverflow { t });
        }
        let mean = terms.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            terms.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        if !mean.is_finite() || !var.is_finite() {
            return Err(Error::MgfOverflow { t });
        }
        curve.values.push(mean);
        curve.standard_errors.push((var / n).sqrt());
    }
    Ok(curve)
}

pub fn empirical_mgf(batch: &SampleBatch, t_grid: &[f64]) -> Result<MgfCurve> {
    check_grid(t_grid)?;
    mean_and_se(batch.values(), t_grid)
}

/// Empirical MGF of `ln x`, i.e. the sample power moments `mean(x^t)`.
pub fn empirical_log_mgf(batch: &SampleBatch, t_grid: &[f64]) -> Result<MgfCurve> {
    check_grid(t_grid)?;
    let logs = positive_logs(batch)?;
    mean_and_se(&logs, t_grid)
}

fn positive_logs(batch: &SampleBatch) -> Result<Vec<f64>> {
    batch
        .values()
        .iter()
        .map(|&x| {
            if x > 0.0 {
                Ok(x.ln())
            } else {
                Err(domain("log-moment input (needs x > 0)", x))
            }
        })
        .collect()
}

/// Largest `|curve - analytic| / SE` over the grid, tested against `z`.
pub fn compare_mgf(
    curve: &MgfCurve,
    analytic: impl Fn(f64) -> Result<f64>,
    z: f64,
) -> Result<TestResult> {
    check_band_width(z)?;
    let exact = curve
        .t_grid
        .iter()
        .map(|&t| analytic(t))
        .collect::<Result<Vec<f64>>>()?;
    let scores: Vec<f64> = curve
        .values
        .iter()
        .zip(&exact)
        .zip(&curve.standard_errors)
        .map(|((v, a), &se)| band_score(v - a, se))
        .collect();
    let degenerate: Vec<f64> = curve
        .t_grid
        .iter()
        .zip(curve.values.iter().zip(&exact))
        .zip(&curve.standard_errors)
        .filter(|((_, (v, a)), &se)| se == 0.0 && v != a)
        .map(|((&t, _), _)| t)
        .collect();
    let statistic = scores.iter().copied().fold(0.0, f64::max);
    let mut metadata = BTreeMap::from([
        ("z".to_string(), json!(z)),
        ("grid".to_string(), json!(curve.t_grid)),
        ("empirical".to_string(), json!(curve.values)),
        ("standard_errors".to_string(), json!(curve.standard_errors)),
        ("analytic".to_string(), json!(exact)),
        ("scores".to_string(), json!(scores)),
    ]);
    if !degenerate.is_empty() {
        metadata.insert(
            "diagnostic".to_string(),
            json!(format!("zero standard error with nonzero deviation at t = {degenerate:?}")),
        );
    }
    Ok(TestResult::new(TestKind::MgfGrid, statistic, z, None, metadata))
}

/// Compares the empirical MGFs of `ln a` and `ln b` point by point, scaling
/// each gap by the combined standard error `sqrt(se_a^2 + se_b^2)`.
pub fn log_moment_check(
    a: &SampleBatch,
    b: &SampleBatch,
    t_grid: &[f64],
    z: f64,
) -> Result<TestResult> {
    check_band_width(z)?;
    let ca = empirical_log_mgf(a, t_grid)?;
    let cb = empirical_log_mgf(b, t_grid)?;
    let scores: Vec<f64> = (0..t_grid.len())
        .map(|i| {
            let se = ca.standard_errors[i].hypot(cb.standard_errors[i]);
            band_score(ca.values[i] - cb.values[i], se)
        })
        .collect();
    let statistic = scores.iter().copied().fold(0.0, f64::max);
    let metadata = BTreeMap::from([
        ("z".to_string(), json!(z)),
        ("grid".to_string(), json!(t_grid)),
        ("n_lhs".to_string(), json!(a.n())),
        ("n_rhs".to_string(), json!(b.n())),
        ("lhs".to_string(), json!(ca.values)),
        ("rhs".to_string(), json!(cb.values)),
        ("lhs_standard_errors".to_string(), json!(ca.standard_errors)),
        ("rhs_standard_errors".to_string(), json!(cb.standard_errors)),
        ("scores".to_string(), json!(scores)),
    ]);
    Ok(TestResult::new(TestKind::LogMoment, statistic, z, None, metadata))
}
