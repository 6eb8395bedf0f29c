//! Fiber-coupled Gaussian mode and the condensate wavefunction.
//!
//! Coordinates are `[x, y, z]` with the fiber axis along `z`; all lengths in
//! units of `1/k_d`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive and finite, got {value}")))
    }
}

/// Paraxial Gaussian mode that the collection optics image onto the fiber core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianBeam {
    k_bar: f64,
    w0_bar: f64,
}

impl GaussianBeam {
    pub fn new(k_bar: f64, w0_bar: f64) -> Result<Self> {
        require_positive("wavenumber", k_bar)?;
        require_positive("beam waist", w0_bar)?;
        Ok(Self { k_bar, w0_bar })
    }

    /// Beam at the drive wavenumber (`k_bar = 1`).
    pub fn with_waist(w0_bar: f64) -> Result<Self> {
        Self::new(1.0, w0_bar)
    }

    pub fn k_bar(&self) -> f64 {
        self.k_bar
    }

    pub fn w0_bar(&self) -> f64 {
        self.w0_bar
    }

    pub fn rayleigh_range(&self) -> f64 {
        0.5 * self.k_bar * self.w0_bar * self.w0_bar
    }

    /// Transverse size `w(z)`.
    pub fn width(&self, z: f64) -> f64 {
        let zr = self.rayleigh_range();
        self.w0_bar * (1.0 + (z / zr).powi(2)).sqrt()
    }

    /// Wavefront radius of curvature; infinite at the focus.
    pub fn curvature_radius(&self, z: f64) -> f64 {
        if z == 0.0 {
            f64::INFINITY
        } else {
            z + self.rayleigh_range().powi(2) / z
        }
    }

    pub fn gouy_phase(&self, z: f64) -> f64 {
        (z / self.rayleigh_range()).atan()
    }

    /// Complex beam parameter `q(z) = z + i z_R`.
    pub fn q(&self, z: f64) -> Complex64 {
        Complex64::new(z, self.rayleigh_range())
    }

    /// Mode function `f_k(r) = z_R / q*(z) * exp(i k [z + rho^2 / (2 q*(z))])`.
    ///
    /// Unit modulus at the focus, `e^{-1}` at `rho = w0`.
    pub fn mode_function(&self, r: Vec3) -> Complex64 {
        let [x, y, z] = r;
        let q_conj = self.q(z).conj();
        let rho2 = x * x + y * y;
        let zr = Complex64::new(self.rayleigh_range(), 0.0);
        let phase = Complex64::i() * self.k_bar * (z + rho2 / (2.0 * q_conj));
        zr / q_conj * phase.exp()
    }

    /// Slowly varying envelope `phi_G = f_k e^{-ikz}`.
    pub fn envelope(&self, r: Vec3) -> Complex64 {
        let [x, y, z] = r;
        let q_conj = self.q(z).conj();
        let rho2 = x * x + y * y;
        let zr = Complex64::new(self.rayleigh_range(), 0.0);
        zr / q_conj * (Complex64::i() * self.k_bar * rho2 / (2.0 * q_conj)).exp()
    }

    /// Transverse weight `(w0/w)^2 exp(-rho^2 / (2 w^2))` that the
    /// side-scattering overlap integrates against `|phi_BEC|^2`.
    ///
    /// This is broader than `|mode_function|^2`, which falls off as
    /// `exp(-2 rho^2 / w^2)`; the side-channel factor is defined with this
    /// weight so that it reaches `w0^2 / (sigma^2 + w0^2)` in the short-cloud limit.
    pub fn side_collection_weight(&self, r: Vec3) -> f64 {
        let [x, y, z] = r;
        let w = self.width(z);
        let ratio = self.w0_bar / w;
        ratio * ratio * (-(x * x + y * y) / (2.0 * w * w)).exp()
    }
}

/// Cylindrically symmetric Gaussian condensate, L2-normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BecCloud {
    sigma_bar: f64,
    sigma_z_bar: f64,
}

impl BecCloud {
    pub fn new(sigma_bar: f64, sigma_z_bar: f64) -> Result<Self> {
        require_positive("transverse oscillator length", sigma_bar)?;
        require_positive("longitudinal oscillator length", sigma_z_bar)?;
        Ok(Self { sigma_bar, sigma_z_bar })
    }

    pub fn sigma_bar(&self) -> f64 {
        self.sigma_bar
    }

    pub fn sigma_z_bar(&self) -> f64 {
        self.sigma_z_bar
    }

    /// Ground-state amplitude
    /// `(2 pi)^{-3/4} sigma^{-1} sigma_z^{-1/2} exp(-(x^2+y^2)/(4 sigma^2) - z^2/(4 sigma_z^2))`.
    pub fn wavefunction(&self, r: Vec3) -> f64 {
        let [x, y, z] = r;
        let (s, sz) = (self.sigma_bar, self.sigma_z_bar);
        let norm = (2.0 * PI).powf(-0.75) / (s * sz.sqrt());
        norm * (-(x * x + y * y) / (4.0 * s * s) - z * z / (4.0 * sz * sz)).exp()
    }

    /// Fourier transform `int e^{-i p.r} phi(r) dV`
    /// `= (8 pi)^{3/4} sigma sigma_z^{1/2} exp(-sigma^2 (px^2+py^2) - sigma_z^2 pz^2)`.
    pub fn momentum_wavefunction(&self, p: Vec3) -> f64 {
        let [px, py, pz] = p;
        let (s, sz) = (self.sigma_bar, self.sigma_z_bar);
        let norm = (8.0 * PI).powf(0.75) * s * sz.sqrt();
        norm * (-s * s * (px * px + py * py) - sz * sz * pz * pz).exp()
    }
}

/// Beam, cloud and the scattering configuration they are probed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatterGeometry {
    beam: GaussianBeam,
    cloud: BecCloud,
    theta: f64,
    n_atoms: u64,
    k_ge_over_kd: f64,
}

impl ScatterGeometry {
    /// Forward direction, one atom, emitted wavenumber equal to the drive's.
    pub fn new(cloud: BecCloud, w0_bar: f64) -> Result<Self> {
        Ok(Self {
            beam: GaussianBeam::with_waist(w0_bar)?,
            cloud,
            theta: 0.0,
            n_atoms: 1,
            k_ge_over_kd: 1.0,
        })
    }

    /// Waist set to `sqrt(2) sigma`, which maximizes forward collection.
    pub fn matched(cloud: BecCloud) -> Result<Self> {
        Self::new(cloud, std::f64::consts::SQRT_2 * cloud.sigma_bar())
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidInput(format!("theta must lie in [0, pi], got {theta}")));
        }
        self.theta = theta;
        Ok(self)
    }

    pub fn with_atoms(mut self, n_atoms: u64) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidInput("atom number must be at least 1".into()));
        }
        self.n_atoms = n_atoms;
        Ok(self)
    }

    pub fn with_waist(mut self, w0_bar: f64) -> Result<Self> {
        self.beam = GaussianBeam::new(self.k_ge_over_kd, w0_bar)?;
        Ok(self)
    }

    /// Sets `k_ge / k_d`; the fiber mode is rebuilt at the new wavenumber.
    pub fn with_k_ratio(mut self, k_ge_over_kd: f64) -> Result<Self> {
        self.beam = GaussianBeam::new(k_ge_over_kd, self.beam.w0_bar())?;
        self.k_ge_over_kd = k_ge_over_kd;
        Ok(self)
    }

    pub fn beam(&self) -> &GaussianBeam {
        &self.beam
    }

    pub fn cloud(&self) -> &BecCloud {
        &self.cloud
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn n_atoms(&self) -> u64 {
        self.n_atoms
    }

    pub fn k_ge_over_kd(&self) -> f64 {
        self.k_ge_over_kd
    }
}
