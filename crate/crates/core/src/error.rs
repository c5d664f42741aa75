use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A measured variance at or below the loss floor `1 - eta` cannot come
    /// from any physical state.
    #[error("infeasible measurement: linear variance {variance} <= 1 - eta = {floor}")]
    InfeasibleMeasurement { variance: f64, floor: f64 },

    #[error("fock truncation leaks {leakage:e} of the norm (limit {limit:e})")]
    Truncation { leakage: f64, limit: f64 },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
