//! Adaptive 15-point Gauss-Kronrod quadrature and the normal/exponential
//! mixture density integral.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

// Kronrod abscissae on [0, 1], outermost first; odd indices (and the centre)
// are also the 7-point Gauss abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Absolute error target for the whole integral.
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_subdivisions: 10_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(domain("quadrature tolerance", self.abs_tol));
        }
        if self.max_subdivisions == 0 {
            return Err(domain("quadrature subdivision limit", 0.0));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]`, bisecting the panel with the largest error
/// estimate until the summed estimate is below `spec.abs_tol`.
///
/// `breakpoints` strictly inside `(a, b)` seed the initial partition; use
/// them for kinks and narrow peaks.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(domain("quadrature interval (needs finite a < b)", b - a));
    }
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);

    let mut heap: BinaryHeap<Panel> = edges
        .windows(2)
        .map(|w| gauss_kronrod(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 15 * heap.len();
    let mut subdivisions = 0;

    loop {
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= spec.abs_tol {
            let mut panels = heap.into_vec();
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            return Ok(Quadrature {
                value: panels.iter().map(|p| p.value).sum(),
                error_estimate: error,
                subdivisions,
                evaluations,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                subdivisions,
                estimate: error,
            });
        }
        let worst = heap.pop().expect("partition is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(gauss_kronrod(&f, worst.a, mid));
        heap.push(gauss_kronrod(&f, mid, worst.b));
        evaluations += 30;
        subdivisions += 1;
    }
}

/// Upper limit `U` of the `u = sqrt(v)` integral such that the discarded tail
/// is below `abs_tol / 10`.
///
/// After the substitution the integrand is bounded by
/// `λ² / sqrt(2π) · exp(-λ²u²/2)`, whose tail beyond `U` equals
/// `(λ/2) erfc(λU/√2) <= (λ/2) exp(-λ²U²/2)`. Setting that to `abs_tol / 10`
/// gives `U = sqrt(2 ln(5λ / abs_tol)) / λ`.
pub fn mixture_density_upper_limit(lambda: f64, abs_tol: f64) -> f64 {
    let log_ratio = (5.0 * lambda / abs_tol).ln().max(1.0);
    (2.0 * log_ratio).sqrt() / lambda
}

/// Density at `l` of the normal scale mixture with variance `V ~ (2/λ²) Expo(1)`:
///
/// `∫_0^∞ (2πv)^{-1/2} exp(-l²/(2v)) · (λ²/2) exp(-λ²v/2) dv`.
///
/// Integrated in `u = sqrt(v)`, which removes the `v^{-1/2}` endpoint
/// singularity and leaves the smooth integrand
/// `λ²/sqrt(2π) · exp(-l²/(2u²) - λ²u²/2)` on `(0, U]`.
pub fn mixture_density_quadrature(l: f64, lambda: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain("Laplace scale lambda (needs lambda > 0)", lambda));
    }
    if !l.is_finite() {
        return Err(domain("density argument", l));
    }
    spec.validate()?;
    let upper = mixture_density_upper_limit(lambda, spec.abs_tol);
    let scale = lambda * lambda / (2.0 * PI).sqrt();
    let half_l2 = 0.5 * l * l;
    let half_lambda2 = 0.5 * lambda * lambda;
    let integrand = |u: f64| scale * (-half_l2 / (u * u) - half_lambda2 * u * u).exp();
    // the integrand peaks at u = sqrt(|l| / λ)
    let peak = (l.abs() / lambda).sqrt();
    let body = QuadratureSpec {
        abs_tol: 0.9 * spec.abs_tol,
        ..*spec
    };
    Ok(integrate(integrand, 0.0, upper, &[peak], &body)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::laplace_pdf;

    #[test]
    fn polynomials_are_exact() {
        let spec = QuadratureSpec::default();
        let q = integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0, &[], &spec).unwrap();
        // x^6/6 - x^3 + x from -1 to 2
        let want = (64.0 / 6.0 - 8.0 + 2.0) - (1.0 / 6.0 + 1.0 - 1.0);
        assert!((q.value - want).abs() < 1e-13);
        assert_eq!(q.subdivisions, 0);
    }

    #[test]
    fn smooth_transcendental() {
        let q = integrate(f64::sin, 0.0, PI, &[], &QuadratureSpec::default()).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
        let q = integrate(|x| 1.0 / (1.0 + x * x), -10.0, 10.0, &[], &QuadratureSpec::default())
            .unwrap();
        assert!((q.value - 2.0 * 10f64.atan()).abs() < 1e-10);
    }

    #[test]
    fn laplace_pdf_integrates_to_one() {
        for lambda in [0.5, 1.0, 2.0] {
            let r = 40.0 / lambda;
            let q = integrate(
                |l| laplace_pdf(l, lambda).unwrap(),
                -r,
                r,
                &[0.0],
                &QuadratureSpec::default(),
            )
            .unwrap();
            assert!((q.value - 1.0).abs() < 1e-10, "lambda={lambda}: {}", q.value);
        }
    }

    #[test]
    fn subdivision_limit_reports_estimate() {
        let spec = QuadratureSpec {
            abs_tol: 1e-14,
            max_subdivisions: 3,
        };
        let err = integrate(|x| x.abs().sqrt(), -1.0, 1.0, &[], &spec).unwrap_err();
        match err {
            Error::NonConvergence {
                subdivisions,
                estimate,
            } => {
                assert_eq!(subdivisions, 3);
                assert!(estimate > 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = QuadratureSpec::default();
        assert!(integrate(|x| x, 1.0, 0.0, &[], &spec).is_err());
        assert!(integrate(|x| x, 0.0, 1.0, &[], &QuadratureSpec::with_tolerance(0.0)).is_err());
        assert!(mixture_density_quadrature(0.0, 0.0, &spec).is_err());
        assert!(mixture_density_quadrature(f64::NAN, 1.0, &spec).is_err());
    }

    #[test]
    fn mixture_density_pinned_points() {
        let spec = QuadratureSpec::default();
        let at = |l, lambda| mixture_density_quadrature(l, lambda, &spec).unwrap();
        assert!((at(0.0, 1.0) - 0.5).abs() < 1e-8);
        assert!((at(1.0, 1.0) - 0.183_940).abs() < 1e-6);
        assert!((at(1.0, 1.0) - 0.5 * (-1f64).exp()).abs() < 1e-8);
        assert!((at(0.0, 2.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mixture_density_matches_closed_form() {
        let spec = QuadratureSpec::default();
        for lambda in [0.5, 1.0, 2.0] {
            for i in 0..=100 {
                let l = -10.0 + 0.2 * i as f64;
                let q = mixture_density_quadrature(l, lambda, &spec).unwrap();
                let exact = laplace_pdf(l, lambda).unwrap();
                assert!((q - exact).abs() < 10.0 * spec.abs_tol, "l={l} λ={lambda}");
            }
        }
    }

    #[test]
    fn mixture_density_is_even() {
        let spec = QuadratureSpec::default();
        for l in [0.1, 0.7, 3.0, 9.5] {
            let p = mixture_density_quadrature(l, 1.0, &spec).unwrap();
            let m = mixture_density_quadrature(-l, 1.0, &spec).unwrap();
            assert!((p - m).abs() <= spec.abs_tol);
        }
    }

    #[test]
    fn tail_bound_is_respected() {
        for lambda in [0.5, 1.0, 2.0] {
            let u = mixture_density_upper_limit(lambda, 1e-10);
            assert!(0.5 * lambda * (-0.5 * lambda * lambda * u * u).exp() <= 1e-11 * 1.000_001);
        }
    }
}
