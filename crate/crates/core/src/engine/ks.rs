use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde_json::json;

use super::{TestKind, TestResult};
use crate::dist::SampleBatch;
use crate::error::{domain, Error, Result};

/// `sup_x |F_a(x) - F_b(x)|` over the pooled points, with right-continuous
/// ECDFs; tied values contribute their full jump before the difference is read.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as u128, b.len() as u128);
    let (mut i, mut j) = (0usize, 0usize);
    // |i/na - j/nb| scaled by na*nb, kept in integers so the statistic is symmetric in (a, b)
    let mut best: u128 = 0;
    while i < a.len() && j < b.len() {
        let x = if a[i].total_cmp(&b[j]).is_le() { a[i] } else { b[j] };
        while i < a.len() && a[i].total_cmp(&x).is_le() {
            i += 1;
        }
        while j < b.len() && b[j].total_cmp(&x).is_le() {
            j += 1;
        }
        best = best.max((i as u128 * nb).abs_diff(j as u128 * na));
    }
    Ok(best as f64 / (na * nb) as f64)
}

/// Asymptotic critical value `c(α) sqrt((n_a + n_b) / (n_a n_b))` with
/// `c(α) = sqrt(-ln(α/2) / 2)`.
pub fn ks_critical_value(alpha: f64, na: usize, nb: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("significance level alpha (needs 0 < alpha < 1)", alpha));
    }
    let c = (-(0.5 * alpha).ln() / 2.0).sqrt();
    let (na, nb) = (na as f64, nb as f64);
    Ok(c * ((na + nb) / (na * nb)).sqrt())
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    let p = if x < 1.18 {
        // Jacobi-theta form of the CDF converges fast for small x
        let k = -PI * PI / (8.0 * x * x);
        let cdf = (2.0 * PI).sqrt() / x
            * (1..=20)
                .map(|j| ((2 * j - 1) as f64).powi(2) * k)
                .map(f64::exp)
                .sum::<f64>();
        1.0 - cdf
    } else {
        2.0 * (1..=20)
            .map(|j| {
                let term = (-2.0 * (j * j) as f64 * x * x).exp();
                if j % 2 == 1 {
                    term
                } else {
                    -term
                }
            })
            .sum::<f64>()
    };
    p.clamp(0.0, 1.0)
}

pub fn ks_two_sample(a: &SampleBatch, b: &SampleBatch, alpha: f64) -> Result<TestResult> {
    let threshold = ks_critical_value(alpha, a.n(), b.n())?;
    let statistic = ks_statistic(a.values(), b.values())?;
    let (na, nb) = (a.n() as f64, b.n() as f64);
    let p_value = kolmogorov_survival((na * nb / (na + nb)).sqrt() * statistic);
    let metadata = BTreeMap::from([
        ("alpha".to_string(), json!(alpha)),
        ("n_lhs".to_string(), json!(a.n())),
        ("n_rhs".to_string(), json!(b.n())),
    ]);
    Ok(TestResult::new(
        TestKind::Ks,
        statistic,
        threshold,
        Some(p_value),
        metadata,
    ))
}
