use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("index {index} lies outside the sampled window [{lo}, {hi}]")]
    MissingIndex { index: i64, lo: i64, hi: i64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("coefficient matrix A({index}) is singular or near-singular (condition number {condition:e})")]
    SingularCoefficient { index: i64, condition: f64 },

    #[error("ambiguous growth split: mode rate {rate} lies within 1e-3 of the threshold {threshold}")]
    AmbiguousSplit { rate: f64, threshold: f64 },

    #[error("no exponential dichotomy: fitted decay rate {alpha} is not positive on the {branch} branch")]
    NoDichotomy { alpha: f64, branch: &'static str },

    #[error("summability premise violated at t = {t}")]
    PremiseFailed { t: i64 },

    #[error("operator is not contractive: L = {factor} >= 1")]
    NotContractive { factor: f64 },

    #[error("fixed-point iteration did not reach tolerance within {} iterations", history.len())]
    MaxIterExceeded { history: Vec<f64> },

    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
