use thiserror::Error;

use crate::generating::DifferenceKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pair components must be finite and strictly positive, got ({a}, {b})")]
    InvalidPair { a: f64, b: f64 },

    #[error("mean order must not be NaN")]
    InvalidOrder,

    #[error("arguments must differ, got a = b = {0}")]
    EqualArguments(f64),

    #[error("{name} must lie in the open interval (0, 1), got {value}")]
    OutOfUnitInterval { name: &'static str, value: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid [{x_min}, {x_max}] does not straddle x = 1")]
    GridMissesOne { x_min: f64, x_max: f64 },

    #[error("{0} has no closed-form derivatives")]
    NoClosedForm(DifferenceKind),

    #[error("invalid sampling spec: {0}")]
    InvalidSampling(String),

    #[error("unknown chain id `{0}`")]
    UnknownChain(String),

    #[error("cannot parse `{input}` as {what}")]
    Parse { what: &'static str, input: String },
}
