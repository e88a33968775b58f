use std::collections::BTreeMap;

use serde_json::json;

use super::{band_score, check_band_width, TestKind, TestResult};
use crate::dist::SampleBatch;
use crate::error::{domain, Result};

/// Checks the sample mean and variance against targets, each within `z`
/// standard errors.
///
/// The mean uses `sqrt(s^2 / n)`; the variance uses the asymptotic
/// `sqrt((m4 - s^4) / n)` with `m4` the sample fourth central moment. The
/// statistic is the larger of the two scores.
pub fn moment_check(
    batch: &SampleBatch,
    target_mean: f64,
    target_var: f64,
    z: f64,
) -> Result<TestResult> {
    check_band_width(z)?;
    let n = batch.n();
    if n < 2 {
        return Err(domain("moment check batch size (needs n >= 2)", n as f64));
    }
    let nf = n as f64;
    let mean = batch.mean();
    let var = batch.variance();
    let m4 = batch
        .values()
        .iter()
        .map(|x| (x - mean).powi(4))
        .sum::<f64>()
        / nf;
    let mean_se = (var / nf).sqrt();
    let var_se = ((m4 - var * var).max(0.0) / nf).sqrt();
    let mean_score = band_score(mean - target_mean, mean_se);
    let var_score = band_score(var - target_var, var_se);

    let mut metadata = BTreeMap::from([
        ("n".to_string(), json!(n)),
        ("z".to_string(), json!(z)),
        ("mean".to_string(), json!(mean)),
        ("variance".to_string(), json!(var)),
        ("target_mean".to_string(), json!(target_mean)),
        ("target_variance".to_string(), json!(target_var)),
        ("mean_score".to_string(), json!(mean_score)),
        ("variance_score".to_string(), json!(var_score)),
    ]);
    if var_se == 0.0 {
        metadata.insert(
            "variance_exact_match".to_string(),
            json!(var == target_var),
        );
    }
    Ok(TestResult::new(
        TestKind::Moment,
        mean_score.max(var_score),
        z,
        None,
        metadata,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{sample_expo, sample_laplace};
    use crate::rng::RngStream;

    #[test]
    fn laplace_and_expo_targets() {
        let l = sample_laplace(&RngStream::new(11, "m/laplace"), 1_000_000).unwrap();
        assert!(moment_check(&l, 0.0, 2.0, 6.0).unwrap().passed);
        let e = sample_expo(&RngStream::new(11, "m/expo"), 1_000_000).unwrap();
        assert!(moment_check(&e, 1.0, 1.0, 6.0).unwrap().passed);
        // a wrong variance target is caught
        assert!(!moment_check(&e, 1.0, 1.2, 6.0).unwrap().passed);
    }

    #[test]
    fn constant_batch() {
        let b = SampleBatch::from_values("c", vec![5.0, 5.0, 5.0]).unwrap();
        let r = moment_check(&b, 5.0, 0.0, 6.0).unwrap();
        assert!(r.passed);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.metadata["variance_exact_match"], json!(true));
        assert!(!moment_check(&b, 4.0, 0.0, 6.0).unwrap().passed);
    }

    #[test]
    fn preconditions() {
        let one = SampleBatch::from_values("c", vec![1.0]).unwrap();
        assert!(moment_check(&one, 0.0, 1.0, 6.0).is_err());
        let two = SampleBatch::from_values("c", vec![1.0, 2.0]).unwrap();
        assert!(moment_check(&two, 0.0, 1.0, -1.0).is_err());
    }
}
