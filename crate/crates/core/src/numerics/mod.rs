//! Numerical substrate: special functions, adaptive quadrature, bracketed
//! root finding and one-dimensional maximization.
//!
//! Everything here is a pure function of its inputs.

mod optimize;
mod quadrature;
mod roots;
mod special;

pub use num_complex::Complex64 as ComplexValue;
pub use optimize::{maximize_1d, Maximum};
pub use quadrature::{
    integrate_adaptive, integrate_adaptive_panels, panels_for_oscillation, QuadValue,
    QuadratureResult,
};
pub use roots::find_root;
pub use special::{erf, erfc, erfcx};

use crate::error::{Error, Result};

/// Stopping criteria shared by the quadrature, root and maximization routines.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: usize,
}

impl Tolerances {
    /// Smallest evaluation budget that still fits one Gauss-Kronrod panel.
    pub const MIN_EVALUATIONS: usize = 15;

    pub fn new(abs_tol: f64, rel_tol: f64, max_evaluations: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::InvalidInput(format!("abs_tol must be positive, got {abs_tol}")));
        }
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::InvalidInput(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if max_evaluations < Self::MIN_EVALUATIONS {
            return Err(Error::InvalidInput(format!(
                "max_evaluations must be at least {}, got {max_evaluations}",
                Self::MIN_EVALUATIONS
            )));
        }
        Ok(Self { abs_tol, rel_tol, max_evaluations })
    }

    /// Returns a copy with a different relative tolerance.
    pub fn with_rel_tol(self, rel_tol: f64) -> Result<Self> {
        Self::new(self.abs_tol, rel_tol, self.max_evaluations)
    }

    pub(crate) fn target(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_evaluations: 1_000_000 }
    }
}
