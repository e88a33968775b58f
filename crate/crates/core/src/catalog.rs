//! The ten distributional identities, each as a pair of generators that
//! should agree in law.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist::{sample_with, SampleBatch, Variates};
use crate::error::{domain, Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdentityId {
    I1,
    I2,
    I3,
    I4,
    I5,
    I6,
    I7,
    I8,
    I9,
    I10,
}

impl IdentityId {
    pub const ALL: [IdentityId; 10] = [
        IdentityId::I1,
        IdentityId::I2,
        IdentityId::I3,
        IdentityId::I4,
        IdentityId::I5,
        IdentityId::I6,
        IdentityId::I7,
        IdentityId::I8,
        IdentityId::I9,
        IdentityId::I10,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::I1 => "I1",
            IdentityId::I2 => "I2",
            IdentityId::I3 => "I3",
            IdentityId::I4 => "I4",
            IdentityId::I5 => "I5",
            IdentityId::I6 => "I6",
            IdentityId::I7 => "I7",
            IdentityId::I8 => "I8",
            IdentityId::I9 => "I9",
            IdentityId::I10 => "I10",
        }
    }

    /// Name of the integer parameter, for the two parameterized identities.
    pub fn param_name(self) -> Option<&'static str> {
        match self {
            IdentityId::I7 => Some("k"),
            IdentityId::I8 => Some("n"),
            _ => None,
        }
    }

    pub fn default_params(self) -> &'static [u32] {
        match self {
            IdentityId::I7 => &[1, 2, 5],
            IdentityId::I8 => &[1, 2, 10],
            _ => &[],
        }
    }

    pub fn test_plan(self) -> TestPlan {
        match self {
            IdentityId::I1
            | IdentityId::I4
            | IdentityId::I5
            | IdentityId::I6
            | IdentityId::I8
            | IdentityId::I9 => TestPlan::KsMgf,
            IdentityId::I7 => TestPlan::KsLogMoment,
            IdentityId::I2 | IdentityId::I3 | IdentityId::I10 => TestPlan::Ks,
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            IdentityId::I1 => "Gauss-Laplace transmutation: L = sqrt(2 Expo) Z ~ Laplace",
            IdentityId::I2 => "chi-squared on two degrees of freedom: 2 Expo ~ X_2^2 ~ Z1^2 + Z2^2",
            IdentityId::I3 => "rotation of a normal pair: Z1 Z2 ~ (Z1^2 - Z2^2)/2",
            IdentityId::I4 => "double exponential: L ~ S Expo1 ~ Expo1 - Expo2",
            IdentityId::I5 => "conditioning on (Z1, Z2): sqrt(Z1^2 + Z2^2) Z ~ Z1 Z3 + Z2 Z4",
            IdentityId::I6 => "determinant of a 2x2 standard normal matrix: Z1 Z3 - Z2 Z4 ~ Laplace",
            IdentityId::I7 => "stochastic Legendre duplication: 4 X_k^2 X_{k+1}^2 ~ (X_{2k}^2)^2",
            IdentityId::I8 => {
                "Bartlett off-diagonal: sqrt(X_n^2) Z ~ sum_{i=1}^n Z_{1i} Z_{2i}"
            }
            IdentityId::I9 => "hierarchical scale mixture: V ~ 2 Expo, L | V ~ N(0, V) => L ~ Laplace",
            IdentityId::I10 => "rotation invariance: (Z1 + Z2)/sqrt(2) ~ Z",
        }
    }

    /// Both sides are symmetric about zero.
    pub fn is_symmetric(self) -> bool {
        !self.is_positive()
    }

    /// Both sides are supported on `(0, ∞)`.
    pub fn is_positive(self) -> bool {
        matches!(self, IdentityId::I2 | IdentityId::I7)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(trimmed))
            .ok_or_else(|| Error::UnknownIdentity(trimmed.to_string()))
    }
}

/// Parses `"all"` or a comma-separated list such as `"I1,I7"`; the result is
/// sorted and free of duplicates.
pub fn parse_selection(s: &str) -> Result<Vec<IdentityId>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(IdentityId::ALL.to_vec());
    }
    let mut ids = s
        .split(',')
        .filter(|part| !part.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<IdentityId>>>()?;
    if ids.is_empty() {
        return Err(Error::UnknownIdentity(s.to_string()));
    }
    ids.sort();
    ids.dedup();
    Ok(ids)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestPlan {
    #[serde(rename = "KS")]
    Ks,
    #[serde(rename = "KS+MGF")]
    KsMgf,
    #[serde(rename = "KS+LogMoment")]
    KsLogMoment,
}

impl fmt::Display for TestPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestPlan::Ks => "KS",
            TestPlan::KsMgf => "KS+MGF",
            TestPlan::KsLogMoment => "KS+LogMoment",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "LHS")]
    Lhs,
    #[serde(rename = "RHS")]
    Rhs,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Lhs => "LHS",
            Side::Rhs => "RHS",
        }
    }
}

/// One identity, with its parameter fixed when it has one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentitySpec {
    pub id: IdentityId,
    pub param: Option<u32>,
}

impl IdentitySpec {
    pub fn new(id: IdentityId, param: Option<u32>) -> Result<Self> {
        match (id.param_name(), param) {
            (Some(name), Some(p)) if p < 1 => Err(domain(
                if name == "k" {
                    "I7 degrees of freedom k"
                } else {
                    "I8 sample count n"
                },
                p as f64,
            )),
            (Some(_), Some(_)) | (None, None) => Ok(Self { id, param }),
            (Some(_), None) => Err(Error::Config(format!("{id} requires a parameter"))),
            (None, Some(_)) => Err(Error::Config(format!("{id} takes no parameter"))),
        }
    }

    /// `"I1"`, or `"I7[k=2]"` for parameterized identities.
    pub fn label(&self) -> String {
        match (self.id.param_name(), self.param) {
            (Some(name), Some(p)) => format!("{}[{name}={p}]", self.id),
            _ => self.id.to_string(),
        }
    }

    pub fn citation(&self) -> &'static str {
        self.id.citation()
    }

    pub fn test_plan(&self) -> TestPlan {
        self.id.test_plan()
    }

    /// Closed-form MGF shared by both sides, for identities tested with the MGF plan.
    pub fn analytic_mgf(&self, t: f64) -> Option<f64> {
        if self.test_plan() != TestPlan::KsMgf || t.abs() >= 1.0 {
            return None;
        }
        let laplace = 1.0 / (1.0 - t * t);
        match self.id {
            IdentityId::I8 => Some(laplace.powf(0.5 * self.param? as f64)),
            _ => Some(laplace),
        }
    }

    /// Human-readable expression for one side.
    pub fn expression(&self, side: Side) -> String {
        let p = self.param.unwrap_or(0);
        let s = match (self.id, side) {
            (IdentityId::I1, Side::Lhs) => "sqrt(2 Expo) Z",
            (IdentityId::I1 | IdentityId::I6 | IdentityId::I9, Side::Rhs) => "S Expo",
            (IdentityId::I2, Side::Lhs) => "2 Expo",
            (IdentityId::I2, Side::Rhs) => "Z1^2 + Z2^2",
            (IdentityId::I3, Side::Lhs) => "Z1 Z2",
            (IdentityId::I3, Side::Rhs) => "(Z1^2 - Z2^2)/2",
            (IdentityId::I4, Side::Lhs) => "Expo1 - Expo2",
            (IdentityId::I4, Side::Rhs) => "S Expo",
            (IdentityId::I5, Side::Lhs) => "sqrt(Z1^2 + Z2^2) Z",
            (IdentityId::I5, Side::Rhs) => "Z1 Z3 + Z2 Z4",
            (IdentityId::I6, Side::Lhs) => "Z1 Z3 - Z2 Z4",
            (IdentityId::I7, Side::Lhs) => return format!("4 X_{p}^2 X_{}^2", p + 1),
            (IdentityId::I7, Side::Rhs) => return format!("(X_{}^2)^2", 2 * p),
            (IdentityId::I8, Side::Lhs) => return format!("sqrt(X_{p}^2) Z"),
            (IdentityId::I8, Side::Rhs) => return format!("sum_{{i=1}}^{p} Z_1i Z_2i"),
            (IdentityId::I9, Side::Lhs) => "V ~ 2 Expo; N(0, V)",
            (IdentityId::I10, Side::Lhs) => "(Z1 + Z2)/sqrt(2)",
            (IdentityId::I10, Side::Rhs) => "Z",
        };
        s.to_string()
    }

    /// One draw from `side`, consuming primitives from `v`.
    pub fn draw<V: Variates + ?Sized>(&self, side: Side, v: &mut V) -> f64 {
        let p = self.param.unwrap_or(1);
        match (self.id, side) {
            (IdentityId::I1, Side::Lhs) => {
                let e = v.expo();
                (2.0 * e).sqrt() * v.normal()
            }
            (IdentityId::I1 | IdentityId::I6 | IdentityId::I9, Side::Rhs) => v.laplace(),
            (IdentityId::I2, Side::Lhs) => 2.0 * v.expo(),
            (IdentityId::I2, Side::Rhs) => {
                let (z1, z2) = (v.normal(), v.normal());
                z1 * z1 + z2 * z2
            }
            (IdentityId::I3, Side::Lhs) => v.normal() * v.normal(),
            (IdentityId::I3, Side::Rhs) => {
                let (z1, z2) = (v.normal(), v.normal());
                0.5 * (z1 * z1 - z2 * z2)
            }
            (IdentityId::I4, Side::Lhs) => v.expo() - v.expo(),
            (IdentityId::I4, Side::Rhs) => {
                let s = v.sign();
                s * v.expo()
            }
            (IdentityId::I5, Side::Lhs) => {
                let (z1, z2) = (v.normal(), v.normal());
                (z1 * z1 + z2 * z2).sqrt() * v.normal()
            }
            (IdentityId::I5, Side::Rhs) => {
                let (z1, z2, z3, z4) = (v.normal(), v.normal(), v.normal(), v.normal());
                z1 * z3 + z2 * z4
            }
            (IdentityId::I6, Side::Lhs) => {
                let (z1, z2, z3, z4) = (v.normal(), v.normal(), v.normal(), v.normal());
                z1 * z3 - z2 * z4
            }
            (IdentityId::I7, Side::Lhs) => {
                let a = v.chisq(p);
                4.0 * a * v.chisq(p + 1)
            }
            (IdentityId::I7, Side::Rhs) => {
                let x = v.chisq(2 * p);
                x * x
            }
            (IdentityId::I8, Side::Lhs) => {
                let x = v.chisq(p);
                x.sqrt() * v.normal()
            }
            (IdentityId::I8, Side::Rhs) => (0..p).map(|_| v.normal() * v.normal()).sum(),
            (IdentityId::I9, Side::Lhs) => {
                // stage one: the variance; stage two: a normal draw with that variance
                let variance = 2.0 * v.expo();
                variance.sqrt() * v.normal()
            }
            (IdentityId::I10, Side::Lhs) => {
                (v.normal() + v.normal()) * std::f64::consts::FRAC_1_SQRT_2
            }
            (IdentityId::I10, Side::Rhs) => v.normal(),
        }
    }
}

impl fmt::Display for IdentitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// The catalogue in order I1..I10. Parameterized identities carry their
/// first default (`k = 1` for I7, `n = 1` for I8).
pub fn list_identities() -> Vec<IdentitySpec> {
    IdentityId::ALL
        .into_iter()
        .map(|id| IdentitySpec {
            id,
            param: id.default_params().first().copied(),
        })
        .collect()
}

/// Expands a selection into concrete cases, one per parameter value.
pub fn expand_cases(
    ids: &[IdentityId],
    i7_k_values: &[u32],
    i8_n_values: &[u32],
) -> Result<Vec<IdentitySpec>> {
    let mut cases = Vec::new();
    for &id in ids {
        match id {
            IdentityId::I7 | IdentityId::I8 => {
                let values = if id == IdentityId::I7 {
                    i7_k_values
                } else {
                    i8_n_values
                };
                if values.is_empty() {
                    return Err(Error::Config(format!("no parameter values given for {id}")));
                }
                for &p in values {
                    cases.push(IdentitySpec::new(id, Some(p))?);
                }
            }
            _ => cases.push(IdentitySpec::new(id, None)?),
        }
    }
    Ok(cases)
}

/// `n` draws from one side of `spec`, consuming only `stream`.
pub fn sample_side(
    spec: &IdentitySpec,
    side: Side,
    stream: &RngStream,
    n: usize,
) -> Result<SampleBatch> {
    let spec = IdentitySpec::new(spec.id, spec.param)?;
    let id = format!("{}/{}", spec.label(), side.as_str());
    sample_with(&id, stream, n, |v| spec.draw(side, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Replays fixed primitive values in place of a stream.
    struct Forced {
        normal: f64,
        expo: f64,
        sign: f64,
    }

    impl Variates for Forced {
        fn normal(&mut self) -> f64 {
            self.normal
        }
        fn expo(&mut self) -> f64 {
            self.expo
        }
        fn sign(&mut self) -> f64 {
            self.sign
        }
    }

    #[test]
    fn catalogue_order_and_citations() {
        let all = list_identities();
        assert_eq!(all.len(), 10);
        for (spec, id) in all.iter().zip(IdentityId::ALL) {
            assert_eq!(spec.id, id);
            assert!(!spec.citation().is_empty());
        }
        assert_eq!(all[6].param, Some(1));
        assert_eq!(all[6].expression(Side::Lhs), "4 X_1^2 X_2^2");
        assert_eq!(all[6].expression(Side::Rhs), "(X_2^2)^2");
    }

    #[test]
    fn forced_zero_normals_zero_the_product_form() {
        let spec = IdentitySpec::new(IdentityId::I1, None).unwrap();
        let mut forced = Forced {
            normal: 0.0,
            expo: 1.7,
            sign: 1.0,
        };
        for _ in 0..10 {
            assert_eq!(spec.draw(Side::Lhs, &mut forced), 0.0);
        }
    }

    #[test]
    fn forced_inputs_follow_the_formulas() {
        let mut f = Forced {
            normal: 2.0,
            expo: 0.5,
            sign: -1.0,
        };
        let at = |id, param, side, f: &mut Forced| {
            IdentitySpec::new(id, param).unwrap().draw(side, f)
        };
        assert_eq!(at(IdentityId::I1, None, Side::Lhs, &mut f), 2.0);
        assert_eq!(at(IdentityId::I1, None, Side::Rhs, &mut f), -0.5);
        assert_eq!(at(IdentityId::I2, None, Side::Lhs, &mut f), 1.0);
        assert_eq!(at(IdentityId::I2, None, Side::Rhs, &mut f), 8.0);
        assert_eq!(at(IdentityId::I3, None, Side::Rhs, &mut f), 0.0);
        assert_eq!(at(IdentityId::I4, None, Side::Lhs, &mut f), 0.0);
        assert_eq!(at(IdentityId::I5, None, Side::Rhs, &mut f), 8.0);
        assert_eq!(at(IdentityId::I6, None, Side::Lhs, &mut f), 0.0);
        // chisq(1) = Z^2 = 4, chisq(2) = 2 * Expo = 1
        assert_eq!(at(IdentityId::I7, Some(1), Side::Lhs, &mut f), 16.0);
        assert_eq!(at(IdentityId::I7, Some(1), Side::Rhs, &mut f), 1.0);
        assert_eq!(at(IdentityId::I8, Some(3), Side::Rhs, &mut f), 12.0);
        assert_eq!(at(IdentityId::I10, None, Side::Rhs, &mut f), 2.0);
    }

    #[test]
    fn parameters_are_validated() {
        assert!(IdentitySpec::new(IdentityId::I7, Some(0)).is_err());
        assert!(IdentitySpec::new(IdentityId::I8, None).is_err());
        assert!(IdentitySpec::new(IdentityId::I1, Some(2)).is_err());
        let bad = IdentitySpec {
            id: IdentityId::I7,
            param: Some(0),
        };
        let s = RngStream::new(1, "x");
        assert!(matches!(
            sample_side(&bad, Side::Lhs, &s, 10),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn selection_parsing() {
        assert_eq!(parse_selection("all").unwrap().len(), 10);
        assert_eq!(
            parse_selection("i7, I1,I7").unwrap(),
            vec![IdentityId::I1, IdentityId::I7]
        );
        assert_eq!(
            parse_selection("I1,I11"),
            Err(Error::UnknownIdentity("I11".into()))
        );
        assert!(parse_selection("").is_err());
    }

    #[test]
    fn expansion_and_labels() {
        let cases = expand_cases(&IdentityId::ALL, &[1, 2, 5], &[1, 2, 10]).unwrap();
        assert_eq!(cases.len(), 14);
        assert_eq!(cases[6].label(), "I7[k=1]");
        assert_eq!(cases[11].label(), "I8[n=10]");
        assert!(expand_cases(&[IdentityId::I7], &[], &[1]).is_err());
    }

    #[test]
    fn i2_lhs_mean() {
        let spec = IdentitySpec::new(IdentityId::I2, None).unwrap();
        let b = sample_side(&spec, Side::Lhs, &RngStream::new(5, "I2/LHS/0"), 1_000_000).unwrap();
        // Var(2 Expo) = 4, so 6 SE = 0.012
        assert!((b.mean() - 2.0).abs() < 0.02);
    }

    #[test]
    fn i3_rhs_variance() {
        let spec = IdentitySpec::new(IdentityId::I3, None).unwrap();
        let b = sample_side(&spec, Side::Rhs, &RngStream::new(5, "I3/RHS/0"), 1_000_000).unwrap();
        // (Var Z1^2 + Var Z2^2) / 4 = 1; the SE of s^2 is sqrt(8/n) ~ 0.0028, so this is a 3.5 SE band
        assert!((b.variance() - 1.0).abs() < 0.01);
    }

    #[test]
    fn analytic_mgfs() {
        let i1 = IdentitySpec::new(IdentityId::I1, None).unwrap();
        assert_eq!(i1.analytic_mgf(0.5), Some(4.0 / 3.0));
        let i8 = IdentitySpec::new(IdentityId::I8, Some(2)).unwrap();
        assert_eq!(i8.analytic_mgf(0.5), Some(4.0 / 3.0));
        assert_eq!(IdentitySpec::new(IdentityId::I2, None).unwrap().analytic_mgf(0.1), None);
    }
}
