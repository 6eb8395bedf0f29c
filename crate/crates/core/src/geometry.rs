//! Geometric overlap factors for the two scattering channels.
//!
//! * `xi` weights the side-scattering (isotropic) channel, whose rate is
//!   linear in the atom number and independent of the angle between the
//!   drive and the fiber axis.
//! * `xi0(theta)` is the complex overlap for the superradiant channel in
//!   which the condensate returns to its initial state; its rate goes with
//!   the square of the atom number.
//!
//! Both are reduced to one-dimensional integrals along the fiber axis with
//! the transverse Gaussian integrals done analytically. The 3D tensor-grid
//! routine here is an independent check of that reduction.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    erfcx, integrate_adaptive, integrate_adaptive_panels, panels_for_oscillation, Tolerances,
};
use crate::optics::{BecCloud, GaussianBeam, ScatterGeometry};

/// Half-width of the integration support in units of the longitudinal
/// Gaussian width.
pub const SUPPORT_SIGMAS: f64 = 8.0;

/// Below this longitudinal size the Gaussian weight is treated as a delta
/// function at the focus.
pub const DEGENERATE_SIGMA_Z: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiBreakdown {
    /// 1D quadrature of the reduced integral.
    pub exact: f64,
    /// Short-cloud limit `w0^2 / (sigma^2 + w0^2)`.
    pub approx: f64,
    /// 3D tensor-grid value, when requested.
    pub brute: Option<f64>,
    pub quad_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Xi0Breakdown {
    pub value: Complex64,
    /// Closed form, available in the phase-matched forward direction only.
    pub closed_form: Option<Complex64>,
    /// Short-cloud limit of `|xi0(0)|`.
    pub approx_magnitude: Option<f64>,
    pub quad_error: f64,
}

impl Xi0Breakdown {
    pub fn magnitude_sq(&self) -> f64 {
        self.value.norm_sqr()
    }
}

/// Side-scattering factor
/// `xi = w0^2 / (sqrt(2 pi) sigma_z) int exp(-z^2 / (2 sigma_z^2)) / (sigma^2 + w(z)^2) dz`.
///
/// Only the beam and cloud are read; angle and atom number play no role.
pub fn xi(geometry: &ScatterGeometry, tol: Tolerances) -> Result<XiBreakdown> {
    let beam = geometry.beam();
    let cloud = geometry.cloud();
    let (s, sz, w0) = (cloud.sigma_bar(), cloud.sigma_z_bar(), beam.w0_bar());
    let approx = w0 * w0 / (s * s + w0 * w0);
    if sz < DEGENERATE_SIGMA_Z {
        return Ok(XiBreakdown { exact: approx, approx, brute: None, quad_error: 0.0 });
    }

    let prefactor = w0 * w0 / ((2.0 * PI).sqrt() * sz);
    let integrand = |z: f64| {
        let w = beam.width(z);
        (-z * z / (2.0 * sz * sz)).exp() / (s * s + w * w)
    };
    let half = SUPPORT_SIGMAS * sz;
    // The quadrature tolerance is scaled so that it applies to xi itself.
    let inner_tol = Tolerances::new(tol.abs_tol / prefactor, tol.rel_tol, tol.max_evaluations)?;
    let r = integrate_adaptive(integrand, -half, half, inner_tol)?;
    Ok(XiBreakdown {
        exact: prefactor * r.value,
        approx,
        brute: None,
        quad_error: prefactor * r.abs_error_estimate,
    })
}

/// Same as [`xi`], with the 3D tensor-grid value filled in.
pub fn xi_with_oracle(
    geometry: &ScatterGeometry,
    tol: Tolerances,
    points_per_axis: usize,
) -> Result<XiBreakdown> {
    let mut out = xi(geometry, tol)?;
    out.brute = Some(xi_brute_3d(geometry, points_per_axis)?);
    Ok(out)
}

/// Midpoint tensor-grid evaluation of
/// `int |phi_BEC|^2 (w0/w)^2 exp(-rho^2 / (2 w^2)) dV`
/// over `[-8 sigma, 8 sigma]^2 x [-8 sigma_z, 8 sigma_z]`.
///
/// Slabs of constant `z` are summed independently (possibly in parallel)
/// and combined by pairwise reduction in slab order, so the result does
/// not depend on the thread count.
pub fn xi_brute_3d(geometry: &ScatterGeometry, points_per_axis: usize) -> Result<f64> {
    if points_per_axis < 32 {
        return Err(Error::InvalidInput(format!(
            "brute-force grid needs at least 32 points per axis, got {points_per_axis}"
        )));
    }
    let beam = geometry.beam();
    let cloud = geometry.cloud();
    let n = points_per_axis;
    let lx = SUPPORT_SIGMAS * cloud.sigma_bar();
    let lz = SUPPORT_SIGMAS * cloud.sigma_z_bar();
    let hx = 2.0 * lx / n as f64;
    let hz = 2.0 * lz / n as f64;
    let node = |h: f64, l: f64, i: usize| -l + (i as f64 + 0.5) * h;

    let slabs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let z = node(hz, lz, k);
            let mut sum = 0.0;
            for j in 0..n {
                let y = node(hx, lx, j);
                for i in 0..n {
                    let r = [node(hx, lx, i), y, z];
                    sum += cloud.wavefunction(r).powi(2) * beam.side_collection_weight(r);
                }
            }
            sum
        })
        .collect();
    Ok(pairwise_sum(&slabs) * hx * hx * hz)
}

pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Superradiant overlap
/// `xi0(theta) = z_R / (sqrt(2 pi) sigma_z) int dz exp(E(z)) / (q(z) + i k sigma^2)`
/// with
/// `E(z) = -sigma^2 q sin^2(theta) / (2 (q + i k sigma^2)) + i (cos(theta) - k) z - z^2 / (2 sigma_z^2)`,
/// `q(z) = z + i z_R` and `k = k_ge / k_d`.
///
/// The initial panel layout resolves the longitudinal phase with at least
/// four panels per period before adaptive refinement starts.
pub fn xi0(geometry: &ScatterGeometry, tol: Tolerances) -> Result<Xi0Breakdown> {
    let beam = geometry.beam();
    let cloud = geometry.cloud();
    let theta = geometry.theta();
    let k = geometry.k_ge_over_kd();
    let (s, sz) = (cloud.sigma_bar(), cloud.sigma_z_bar());
    let zr = beam.rayleigh_range();
    let shift = Complex64::new(0.0, k * s * s);
    let sin2 = theta.sin().powi(2);
    let mismatch = theta.cos() - k;

    let transverse = |z: f64| {
        let q = beam.q(z);
        let den = q + shift;
        let exponent = -s * s * sin2 * q / (2.0 * den) + Complex64::new(0.0, mismatch * z);
        exponent.exp() / den
    };

    let forward = theta == 0.0 && k == 1.0;
    let closed_form = forward.then(|| xi0_forward_closed(beam, cloud));
    let approx_magnitude = (theta == 0.0).then(|| zr / (zr + k * s * s));

    if sz < DEGENERATE_SIGMA_Z {
        return Ok(Xi0Breakdown {
            value: transverse(0.0) * zr,
            closed_form,
            approx_magnitude,
            quad_error: 0.0,
        });
    }

    let prefactor = zr / ((2.0 * PI).sqrt() * sz);
    let integrand = |z: f64| transverse(z) * (-z * z / (2.0 * sz * sz)).exp();
    let half = SUPPORT_SIGMAS * sz;

    // Phase rate along z: the plane-wave mismatch, the rotation of
    // 1/(q + i k sigma^2), and the z-dependence of the sin^2 term.
    let c = zr + k * s * s;
    let omega = mismatch.abs() + 1.0 / c + s * s * sin2 * k * s * s / (2.0 * c * c);
    let budget_panels = (tol.max_evaluations / (15 * 4)).max(1);
    let panels = panels_for_oscillation(2.0 * half, omega).min(budget_panels);
    // odd, so that z = 0 is a panel centre
    let panels = if panels.is_multiple_of(2) { panels + 1 } else { panels };

    let inner_tol = Tolerances::new(tol.abs_tol / prefactor, tol.rel_tol, tol.max_evaluations)?;
    let r = integrate_adaptive_panels(integrand, -half, half, inner_tol, panels)?;
    Ok(Xi0Breakdown {
        value: r.value * prefactor,
        closed_form,
        approx_magnitude,
        quad_error: prefactor * r.abs_error_estimate,
    })
}

/// Forward-direction closed form
/// `-i sqrt(pi/2) (z_R / sigma_z) erfcx((z_R + k sigma^2) / (sqrt(2) sigma_z))`,
/// valid when the emitted and drive wavenumbers coincide.
pub fn xi0_forward_closed(beam: &GaussianBeam, cloud: &BecCloud) -> Complex64 {
    let zr = beam.rayleigh_range();
    let (s, sz) = (cloud.sigma_bar(), cloud.sigma_z_bar());
    let arg = (zr + beam.k_bar() * s * s) / (SQRT_2 * sz);
    let scaled = erfcx(arg).expect("argument is positive");
    Complex64::new(0.0, -(PI / 2.0).sqrt() * zr / sz * scaled)
}
