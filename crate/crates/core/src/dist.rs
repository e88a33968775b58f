//! Primitive samplers for the five families (Normal, Exponential,
//! Chi-squared, Laplace, random sign) and their closed forms.
//!
//! Algorithms are fixed because they determine the bits of every batch:
//!
//! * uniforms are `(k + 1/2) * 2^-52` for a 52-bit integer `k`, so they lie
//!   strictly inside `(0, 1)`;
//! * `Expo(1)` is the inverse CDF `-ln(1 - U)`;
//! * `N(0, 1)` is the ziggurat sampler of `rand_distr::StandardNormal`;
//! * `chi^2_k` is the sum of `floor(k/2)` draws of `2 * Expo(1)`, plus one
//!   squared normal when `k` is odd;
//! * the sign is the top bit of one 64-bit word;
//! * the standard Laplace variate is `sign * Expo(1)`.

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::RngStream;

/// Source of primitive variates that the identity generators are written against.
pub trait Variates {
    fn normal(&mut self) -> f64;

    fn expo(&mut self) -> f64;

    /// `+1.0` or `-1.0` with probability one half each.
    fn sign(&mut self) -> f64;

    fn chisq(&mut self, k: u32) -> f64 {
        let mut total = 0.0;
        for _ in 0..k / 2 {
            total += 2.0 * self.expo();
        }
        if k % 2 == 1 {
            let z = self.normal();
            total += z * z;
        }
        total
    }

    fn laplace(&mut self) -> f64 {
        self.sign() * self.expo()
    }
}

/// Variates drawn from one keyed stream.
pub struct StreamVariates<R = ChaCha8Rng> {
    rng: R,
}

impl StreamVariates {
    pub fn new(stream: &RngStream) -> Self {
        Self { rng: stream.rng() }
    }
}

impl<R: RngCore> StreamVariates<R> {
    pub fn from_rng(rng: R) -> Self {
        Self { rng }
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn open_uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
        ((self.rng.next_u64() >> 12) as f64 + 0.5) * SCALE
    }
}

impl<R: RngCore> Variates for StreamVariates<R> {
    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn expo(&mut self) -> f64 {
        let u = self.open_uniform();
        -(1.0 - u).ln()
    }

    fn sign(&mut self) -> f64 {
        if self.rng.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// A finite, non-empty, ordered collection of draws together with where they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    values: Vec<f64>,
    generator_id: String,
    stream: Option<RngStream>,
}

impl SampleBatch {
    pub fn new(
        generator_id: impl Into<String>,
        stream: Option<RngStream>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let generator_id = generator_id.into();
        if values.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                generator: generator_id,
                index,
                value,
            });
        }
        Ok(Self {
            values,
            generator_id,
            stream,
        })
    }

    /// A batch that was not produced by a stream (fixtures, transformed data).
    pub fn from_values(generator_id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::new(generator_id, None, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn generator_id(&self) -> &str {
        &self.generator_id
    }

    pub fn stream(&self) -> Option<&RngStream> {
        self.stream.as_ref()
    }

    /// Applies `f` elementwise; the result keeps this batch's stream.
    pub fn map(&self, generator_id: impl Into<String>, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            generator_id,
            self.stream.clone(),
            self.values.iter().map(|&x| f(x)).collect(),
        )
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n() as f64
    }

    /// Unbiased sample variance; zero for a single draw.
    pub fn variance(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        self.values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    }
}

/// Draws `n` values from `stream`, one call of `draw` per value.
pub fn sample_with(
    generator_id: &str,
    stream: &RngStream,
    n: usize,
    mut draw: impl FnMut(&mut StreamVariates) -> f64,
) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    let mut variates = StreamVariates::new(stream);
    let values = (0..n).map(|_| draw(&mut variates)).collect();
    SampleBatch::new(generator_id, Some(stream.clone()), values)
}

pub fn sample_normal(stream: &RngStream, n: usize) -> Result<SampleBatch> {
    sample_with("normal", stream, n, |v| v.normal())
}

pub fn sample_expo(stream: &RngStream, n: usize) -> Result<SampleBatch> {
    sample_with("expo", stream, n, |v| v.expo())
}

pub fn sample_chisq(stream: &RngStream, k: u32, n: usize) -> Result<SampleBatch> {
    if k < 1 {
        return Err(domain("chi-squared degrees of freedom", k as f64));
    }
    sample_with(&format!("chisq({k})"), stream, n, |v| v.chisq(k))
}

pub fn sample_laplace(stream: &RngStream, n: usize) -> Result<SampleBatch> {
    sample_with("laplace", stream, n, |v| v.laplace())
}

pub fn sample_sign(stream: &RngStream, n: usize) -> Result<SampleBatch> {
    sample_with("sign", stream, n, |v| v.sign())
}

/// `E exp(tZ) = exp(t^2 / 2)`.
pub fn mgf_normal(t: f64) -> f64 {
    (0.5 * t * t).exp()
}

/// `E exp(t Expo) = 1 / (1 - t)`, finite only for `t < 1`.
pub fn mgf_expo(t: f64) -> Result<f64> {
    if t.is_nan() || t >= 1.0 {
        return Err(domain("exponential MGF argument (needs t < 1)", t));
    }
    Ok(1.0 / (1.0 - t))
}

/// `E exp(tL) = 1 / (1 - t^2)` for the standard Laplace, `|t| < 1`.
pub fn mgf_laplace(t: f64) -> Result<f64> {
    if t.is_nan() || t.abs() >= 1.0 {
        return Err(domain("Laplace MGF argument (needs |t| < 1)", t));
    }
    Ok(1.0 / (1.0 - t * t))
}

/// Laplace density with rate `lambda`: `(lambda / 2) exp(-lambda |l|)`.
pub fn laplace_pdf(l: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain("Laplace scale lambda (needs lambda > 0)", lambda));
    }
    Ok(0.5 * lambda * (-lambda * l.abs()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Normal,
    Expo,
    ChiSq(u32),
    /// Rate `lambda`; the standard Laplace (variance two) is `lambda = 1`.
    Laplace(f64),
    Sign,
}

/// A family with validated parameters and its analytic moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticForm {
    family: Family,
}

impl AnalyticForm {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::ChiSq(0) => Err(domain("chi-squared degrees of freedom", 0.0)),
            Family::Laplace(lambda) if !(lambda > 0.0) || !lambda.is_finite() => {
                Err(domain("Laplace scale lambda (needs lambda > 0)", lambda))
            }
            _ => Ok(Self { family }),
        }
    }

    pub fn normal() -> Self {
        Self {
            family: Family::Normal,
        }
    }

    pub fn expo() -> Self {
        Self {
            family: Family::Expo,
        }
    }

    pub fn chisq(k: u32) -> Result<Self> {
        Self::new(Family::ChiSq(k))
    }

    pub fn laplace(lambda: f64) -> Result<Self> {
        Self::new(Family::Laplace(lambda))
    }

    pub fn standard_laplace() -> Self {
        Self {
            family: Family::Laplace(1.0),
        }
    }

    pub fn sign() -> Self {
        Self {
            family: Family::Sign,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            Family::Normal | Family::Laplace(_) | Family::Sign => 0.0,
            Family::Expo => 1.0,
            Family::ChiSq(k) => k as f64,
        }
    }

    pub fn variance(&self) -> f64 {
        match self.family {
            Family::Normal | Family::Expo | Family::Sign => 1.0,
            Family::ChiSq(k) => 2.0 * k as f64,
            Family::Laplace(lambda) => 2.0 / (lambda * lambda),
        }
    }

    pub fn mgf(&self, t: f64) -> Result<f64> {
        match self.family {
            Family::Normal => Ok(mgf_normal(t)),
            Family::Expo => mgf_expo(t),
            Family::ChiSq(k) => {
                if t.is_nan() || t >= 0.5 {
                    return Err(domain("chi-squared MGF argument (needs t < 1/2)", t));
                }
                Ok((1.0 - 2.0 * t).powf(-0.5 * k as f64))
            }
            Family::Laplace(lambda) => {
                if t.is_nan() || t.abs() >= lambda {
                    return Err(domain("Laplace MGF argument (needs |t| < lambda)", t));
                }
                Ok(lambda * lambda / (lambda * lambda - t * t))
            }
            Family::Sign => Ok(t.cosh()),
        }
    }
}
