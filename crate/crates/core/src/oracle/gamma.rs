use std::f64::consts::{LN_2, PI};

use crate::error::{domain, Result};

/// Arguments below this are shifted upward by the recurrence `Γ(x+1) = xΓ(x)`
/// before the asymptotic series is applied.
const STIRLING_MIN: f64 = 10.0;

/// `B_{2j} / (2j (2j - 1))` for `j = 1..=8`.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Natural log of the Gamma function for `x > 0`.
///
/// Stirling's series truncated after the `B_16` term, evaluated at
/// `x + m >= 10`; the neglected term is below `2e-18` there.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("log-gamma argument (needs x > 0)", x));
    }
    let mut shifted = x;
    let mut product = 1.0;
    while shifted < STIRLING_MIN {
        product *= shifted;
        shifted += 1.0;
    }
    Ok(stirling(shifted) - product.ln())
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = STIRLING_COEFFS
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * inv2 + c)
        * inv;
    (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + series
}

/// `E (chi^2_k)^t = 2^t Γ(k/2 + t) / Γ(k/2)`, defined for `k/2 + t > 0`.
pub fn chisq_power_moment(k: u32, t: f64) -> Result<f64> {
    if k < 1 {
        return Err(domain("chi-squared degrees of freedom", k as f64));
    }
    let half = 0.5 * k as f64;
    if !(half + t > 0.0) {
        return Err(domain("chi-squared moment order (needs k/2 + t > 0)", t));
    }
    Ok((t * LN_2 + log_gamma(half + t)? - log_gamma(half)?).exp())
}

/// `ln Γ(z) + ln Γ(z + 1/2) - [(1 - 2z) ln 2 + ln(π)/2 + ln Γ(2z)]`, which is
/// zero by the duplication formula.
pub fn duplication_residual(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain("duplication argument (needs z > 0)", z));
    }
    let lhs = log_gamma(z)? + log_gamma(z + 0.5)?;
    let rhs = (1.0 - 2.0 * z) * LN_2 + 0.5 * PI.ln() + log_gamma(2.0 * z)?;
    Ok(lhs - rhs)
}

/// Both sides of `E(4 X_k X_{k+1})^t = E((X_{2k})^2)^t` for independent
/// chi-squared variables, i.e. the MGFs of `ln 4 + ln X_k + ln X_{k+1}` and
/// `2 ln X_{2k}` at `t`.
pub fn i7_logmgf_identity(k: u32, t: f64) -> Result<(f64, f64)> {
    if k < 1 {
        return Err(domain("chi-squared degrees of freedom", k as f64));
    }
    if !(0.5 * k as f64 + t > 0.0) {
        return Err(domain("log-moment order (needs k/2 + t > 0)", t));
    }
    let lhs = 4f64.powf(t) * chisq_power_moment(k, t)? * chisq_power_moment(k + 1, t)?;
    let rhs = chisq_power_moment(2 * k, 2.0 * t)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    /// ln Γ(n) = ln (n-1)! summed term by term.
    fn ln_factorial_oracle(n: u32) -> f64 {
        (1..n).map(|i| (i as f64).ln()).sum()
    }

    /// ln Γ(n + 1/2) = ln √π + Σ_{i=1}^{n} ln(i - 1/2).
    fn ln_half_integer_oracle(n: u32) -> f64 {
        0.5 * PI.ln() + (1..=n).map(|i| (i as f64 - 0.5).ln()).sum::<f64>()
    }

    fn scaled_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs().max(1.0)
    }

    #[test]
    fn pinned_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-14);
        assert!((log_gamma(0.5).unwrap() - 0.572_364_9).abs() < 1e-7);
        assert!((log_gamma(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((log_gamma(10.0).unwrap() - 362_880f64.ln()).abs() < 1e-13);
        assert!((log_gamma(10.0).unwrap() - 12.801_827_5).abs() < 1e-7);
    }

    #[test]
    fn domain_errors() {
        for x in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(log_gamma(x), Err(Error::Domain { .. })), "{x}");
        }
        assert!(duplication_residual(0.0).is_err());
        assert!(duplication_residual(-1.0).is_err());
        assert!(chisq_power_moment(1, -0.5).is_err());
        assert!(chisq_power_moment(0, 1.0).is_err());
        assert!(i7_logmgf_identity(1, -0.5).is_err());
    }

    #[test]
    fn integer_and_half_integer_arguments() {
        for n in 1..=100 {
            let got = log_gamma(n as f64).unwrap();
            assert!(scaled_err(got, ln_factorial_oracle(n)) < 1e-12, "n={n}");
        }
        for n in 0..100 {
            let got = log_gamma(n as f64 + 0.5).unwrap();
            assert!(scaled_err(got, ln_half_integer_oracle(n)) < 1e-12, "n={n}.5");
        }
    }

    #[test]
    fn agrees_with_independent_lanczos() {
        for i in 0..=1000 {
            let x = 0.5 + 99.5 * i as f64 / 1000.0;
            let want = statrs::function::gamma::ln_gamma(x);
            let got = log_gamma(x).unwrap();
            assert!(scaled_err(got, want) < 1e-12, "x={x} got={got} want={want}");
        }
    }

    #[test]
    fn power_moments() {
        assert!((chisq_power_moment(2, 1.0).unwrap() - 2.0).abs() < 1e-14);
        for k in 1..=20 {
            assert_eq!(chisq_power_moment(k, 0.0).unwrap(), 1.0);
            let m1 = chisq_power_moment(k, 1.0).unwrap();
            assert!((m1 - k as f64).abs() / k as f64 <= 1e-12, "k={k}");
            // E X^2 = k(k+2)
            let m2 = chisq_power_moment(k, 2.0).unwrap();
            let want = (k * (k + 2)) as f64;
            assert!((m2 - want).abs() / want <= 1e-12, "k={k}");
        }
        // 2^{1/2} Γ(1) / Γ(1/2)
        let want = (2.0 / PI).sqrt();
        assert!((chisq_power_moment(1, 0.5).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.797_884_6).abs() < 1e-7);
    }

    #[test]
    fn duplication_residual_points() {
        assert!(duplication_residual(1.0).unwrap().abs() < 1e-12);
        assert!(duplication_residual(0.5).unwrap().abs() < 1e-12);
        assert!(duplication_residual(7.3).unwrap().abs() < 1e-10);
    }

    #[test]
    fn i7_sides() {
        assert_eq!(i7_logmgf_identity(1, 0.0).unwrap(), (1.0, 1.0));
        // t = 1: 4 E X_1 E X_2 = 8 and E X_2^2 = Var + mean^2 = 4 + 4 = 8
        let (lhs, rhs) = i7_logmgf_identity(1, 1.0).unwrap();
        assert!((lhs - 8.0).abs() < 1e-12 && (rhs - 8.0).abs() < 1e-12, "{lhs} {rhs}");
        let (lhs, rhs) = i7_logmgf_identity(2, 0.5).unwrap();
        assert!((lhs - rhs).abs() / rhs < 1e-12);
        // t = 2, k = 1: 16 * E X_1^2 * E X_2^2 = 16 * 3 * 8 ; E X_2^4 = 2*4*6*8
        let (lhs, rhs) = i7_logmgf_identity(1, 2.0).unwrap();
        assert!((lhs - 384.0).abs() < 1e-9 && (rhs - 384.0).abs() < 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn recurrence_holds(x in 0.5f64..100.0) {
                let lhs = log_gamma(x + 1.0).unwrap();
                let rhs = log_gamma(x).unwrap() + x.ln();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
            }

            #[test]
            fn duplication_holds(z in 0.05f64..200.0) {
                prop_assert!(duplication_residual(z).unwrap().abs() < 1e-10);
            }
        }
    }
}
