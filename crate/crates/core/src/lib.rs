//! Seed-deterministic generators for the Gauss-Laplace family of
//! distributional identities, closed-form evaluators, and a two-sample
//! equivalence-testing engine that checks each identity statistically.
//!
//! The pieces:
//!
//! * [`rng`]: keyed streams addressed by `(master_seed, label)`;
//! * [`dist`]: Normal, Exponential, chi-squared, Laplace and sign samplers,
//!   their MGFs and the Laplace density;
//! * [`catalog`]: identities I1..I10 as pairs of generators;
//! * [`engine`]: KS, MGF-band, log-moment and moment checks, and the suite
//!   runner producing an [`engine::EquivalenceReport`];
//! * [`oracle`]: log-gamma, chi-squared power moments, the duplication
//!   residual and adaptive quadrature of the mixture density.

pub mod catalog;
pub mod dist;
pub mod engine;
mod error;
pub mod oracle;
pub mod rng;

pub use error::{Error, Result};
