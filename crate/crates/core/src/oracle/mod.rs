//! Closed-form and quadrature ground truth used to check the samplers and
//! the identities analytically.

mod gamma;
mod quadrature;

pub use gamma::{chisq_power_moment, duplication_residual, i7_logmgf_identity, log_gamma};
pub use quadrature::{
    integrate, mixture_density_quadrature, mixture_density_upper_limit, Quadrature,
    QuadratureSpec,
};
