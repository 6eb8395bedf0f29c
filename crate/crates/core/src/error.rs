use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical routines and the model layers above them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the domain of a function (NaN, negative width, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Result not representable as a finite `f64`.
    #[error("range error: {0}")]
    Range(String),

    /// A caller-side precondition was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature ran out of evaluations before meeting its tolerance.
    /// The best estimate so far is carried along.
    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (estimate {estimate:e}, error {abs_error:e})"
    )]
    NonConvergence {
        estimate: Complex64,
        abs_error: f64,
        evaluations: usize,
    },

    /// Root finder was handed a bracket without a sign change.
    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    NoBracket { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
