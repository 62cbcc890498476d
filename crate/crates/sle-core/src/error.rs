//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by kernels, samplers and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SleError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A Gamma factor (or q-integer denominator) hits a pole.
    #[error("pole in {what} at argument {arg}")]
    Pole { what: String, arg: f64 },
    /// A tracked boundary point was swallowed by the hull.
    #[error("tracked point swallowed at time {time}")]
    Swallowed { time: f64 },
    /// Two driving angles came closer than the collision threshold.
    #[error("collision between curves {i} and {j} at time {time} (gap {gap:e})")]
    Collision { i: usize, j: usize, time: f64, gap: f64 },
    /// A finite-difference stencil does not fit the configuration.
    #[error("stencil error: {0}")]
    Stencil(String),
    /// A numerical procedure produced a non-finite or out-of-range value.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Quadrature or another iterative method failed to converge.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// Too few usable samples to reach a verdict.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, SleError>;

pub(crate) fn domain(msg: impl Into<String>) -> SleError {
    SleError::Domain(msg.into())
}
