use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("batch must contain at least one draw")]
    EmptyBatch,
    #[error("{what} is out of its domain: got {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("non-finite value {value} at index {index} of batch `{generator}`")]
    NonFinite {
        generator: String,
        index: usize,
        value: f64,
    },
    #[error("exp(t*x) overflowed at grid point t = {t}")]
    MgfOverflow { t: f64 },
    #[error("unknown identity `{0}` (expected I1..I10)")]
    UnknownIdentity(String),
    #[error("quadrature did not converge within {subdivisions} subdivisions (error estimate {estimate:e})")]
    NonConvergence { subdivisions: usize, estimate: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
