//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A value outside its documented domain (non-finite angle, empty
    /// series, probability level outside [0, 1], ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A lag that does not leave at least one usable pair in the series.
    #[error("invalid lag {lag} for series of length {len}")]
    InvalidLag { lag: usize, len: usize },

    /// Feature tensors built with different lags, levels or radius.
    #[error("incompatible features: {0}")]
    IncompatibleFeatures(String),

    /// A clustering or run configuration that cannot be executed.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Generator coefficients violating stationarity or positivity.
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
