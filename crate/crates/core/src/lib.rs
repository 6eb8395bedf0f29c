//! Collection efficiency of optical photons Raman-scattered off a
//! Bose-Einstein condensate into a fiber-coupled Gaussian mode.
//!
//! Lengths are dimensionless throughout, measured in units of the inverse
//! drive wavenumber `1/k_d`.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod optics;
pub mod plot;
pub mod pulses;
pub mod rates;
pub mod selfcheck;
pub mod table;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/units.md")]
    mod units {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/beam_and_cloud.md")]
    mod beam_and_cloud {}
    #[doc = include_str!("../../../book/src/geometric_factors.md")]
    mod geometric_factors {}
    #[doc = include_str!("../../../book/src/rates.md")]
    mod rates {}
    #[doc = include_str!("../../../book/src/pulses.md")]
    mod pulses {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
