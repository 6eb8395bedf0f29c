//! Photon-rate prefactors for the two channels, the critical angle that
//! separates them, the optimal waist, and the parameter scans built on them.
//!
//! Rates are reported with the single-atom scattering rate `Gamma |eps(t)|^2`
//! factored out (see [`crate::pulses`] for `eps`).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{xi, xi0};
use crate::numerics::{find_root, maximize_1d, Tolerances};
use crate::optics::{BecCloud, ScatterGeometry};
use crate::table::{RowStatus, ScanTable};

/// Default upper end of the critical-angle search, in radians.
pub const DEFAULT_THETA_WINDOW: f64 = 0.1;
/// Points in the coarse scan that brackets the critical angle.
pub const CRITICAL_SCAN_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelRates {
    /// `I / (Gamma |eps|^2) = N (sigma_A / A) xi`
    pub side_prefactor: f64,
    /// `I_0 / (Gamma |eps|^2) = N^2 (sigma_A / A) |xi0|^2`
    pub forward_prefactor: f64,
    /// `sigma_A / A`
    pub cross_section_ratio: f64,
    pub xi: f64,
    pub xi0_sq: f64,
}

/// Atomic radiative cross section over the beam cross section,
/// `(6 pi / k^2) / (pi w0^2 / 4) = 24 / (k w0)^2` with `k` the emitted wavenumber.
pub fn cross_section_ratio(geometry: &ScatterGeometry) -> f64 {
    let kw = geometry.k_ge_over_kd() * geometry.beam().w0_bar();
    24.0 / (kw * kw)
}

pub fn channel_rates(geometry: &ScatterGeometry, tol: Tolerances) -> Result<ChannelRates> {
    let side = xi(geometry, tol)?.exact;
    let forward = xi0(geometry, tol)?.magnitude_sq();
    let ratio = cross_section_ratio(geometry);
    let n = geometry.n_atoms() as f64;
    Ok(ChannelRates {
        side_prefactor: n * ratio * side,
        forward_prefactor: n * n * ratio * forward,
        cross_section_ratio: ratio,
        xi: side,
        xi0_sq: forward,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalAngleResult {
    /// First angle where `N |xi0|^2 = xi`.
    pub theta_star: Option<f64>,
    /// Superradiance does not beat the isotropic channel even at `theta = 0`.
    pub dominated_everywhere: bool,
    pub bracket: (f64, f64),
}

/// Smallest `theta` in `(0, theta_max]` with `N |xi0(theta)|^2 = xi`.
///
/// A uniform scan locates the first sign change of `N |xi0|^2 - xi`, which
/// is then refined with [`find_root`]. Later recrossings are ignored. When
/// the forward channel loses already at `theta = 0` the result is flagged
/// `dominated_everywhere`; when it wins over the whole window `theta_star`
/// is absent and the bracket is the full window.
pub fn critical_angle(
    geometry: &ScatterGeometry,
    theta_max: f64,
    tol: Tolerances,
) -> Result<CriticalAngleResult> {
    if !(theta_max > 0.0 && theta_max <= std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidInput(format!("theta_max must lie in (0, pi/2], got {theta_max}")));
    }
    let side = xi(geometry, tol)?.exact;
    let n = geometry.n_atoms() as f64;
    let excess = |theta: f64| -> Result<f64> {
        let g = geometry.with_theta(theta)?;
        Ok(n * xi0(&g, tol)?.magnitude_sq() - side)
    };

    let at_zero = excess(0.0)?;
    if at_zero <= 0.0 {
        return Ok(CriticalAngleResult {
            theta_star: None,
            dominated_everywhere: true,
            bracket: (0.0, 0.0),
        });
    }
    let step = theta_max / CRITICAL_SCAN_POINTS as f64;
    let mut lo = 0.0;
    for i in 1..=CRITICAL_SCAN_POINTS {
        let theta = if i == CRITICAL_SCAN_POINTS { theta_max } else { step * i as f64 };
        let value = excess(theta)?;
        if value <= 0.0 {
            let root = if value == 0.0 { theta } else { find_root(excess, lo, theta, tol)? };
            return Ok(CriticalAngleResult {
                theta_star: Some(root),
                dominated_everywhere: false,
                bracket: (lo, theta),
            });
        }
        lo = theta;
    }
    Ok(CriticalAngleResult { theta_star: None, dominated_everywhere: false, bracket: (0.0, theta_max) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaistOptimum {
    pub w0_bar: f64,
    pub forward_prefactor: f64,
    /// The optimum lies on an end of the searched range.
    pub at_boundary: bool,
}

/// Forward prefactor `N^2 (24 / w0^2) |xi0(theta)|^2` as a function of the waist.
pub fn forward_prefactor_for_waist(
    cloud: &BecCloud,
    n_atoms: u64,
    theta: f64,
    w0_bar: f64,
    tol: Tolerances,
) -> Result<f64> {
    let g = ScatterGeometry::new(*cloud, w0_bar)?.with_theta(theta)?.with_atoms(n_atoms)?;
    let n = n_atoms as f64;
    Ok(n * n * cross_section_ratio(&g) * xi0(&g, tol)?.magnitude_sq())
}

/// Waist maximizing the forward (superradiant) prefactor over `w_range`.
pub fn optimal_waist(
    cloud: &BecCloud,
    n_atoms: u64,
    theta: f64,
    w_range: (f64, f64),
    tol: Tolerances,
) -> Result<WaistOptimum> {
    let (lo, hi) = w_range;
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::InvalidInput(format!("waist range must satisfy 0 < lo < hi, got ({lo}, {hi})")));
    }
    let best = maximize_1d(
        |w| forward_prefactor_for_waist(cloud, n_atoms, theta, w, tol),
        lo,
        hi,
        tol,
    )?;
    Ok(WaistOptimum { w0_bar: best.argmax, forward_prefactor: best.value, at_boundary: best.at_boundary })
}

/// Rows `(theta, |xi0(theta)|^2, xi / N)` for the given angles, in input order.
///
/// A failing row is recorded in the table and the scan continues.
pub fn theta_scan(geometry: &ScatterGeometry, thetas: &[f64], tol: Tolerances) -> Result<ScanTable> {
    if thetas.is_empty() {
        return Err(Error::InvalidInput("theta scan needs at least one angle".into()));
    }
    if let Some(bad) = thetas.iter().find(|t| !(0.0..=std::f64::consts::PI).contains(*t)) {
        return Err(Error::InvalidInput(format!("scan angle {bad} outside [0, pi]")));
    }
    let side = xi(geometry, tol)?;
    let per_atom = side.exact / geometry.n_atoms() as f64;

    let rows: Vec<Result<(f64, f64)>> = thetas
        .par_iter()
        .map(|&theta| {
            let v = xi0(&geometry.with_theta(theta)?, tol)?;
            Ok((v.magnitude_sq(), v.quad_error))
        })
        .collect();

    let mut table = ScanTable::new(["theta", "xi0_sq", "xi_over_n"]);
    let mut max_error: f64 = 0.0;
    for (&theta, row) in thetas.iter().zip(rows) {
        match row {
            Ok((sq, err)) => {
                max_error = max_error.max(err);
                table.push_values(&[theta, sq, per_atom]);
            }
            Err(e) => table.push(vec![Some(theta), None, Some(per_atom)], RowStatus::Failed(e.to_string())),
        }
    }
    table.set_meta("xi_quad_error", side.quad_error);
    table.set_meta("xi0_max_quad_error", max_error);
    Ok(table)
}

/// Rows `(N, theta_star, superradiant_at_zero)` for each atom number.
///
/// `theta_star` is empty when no crossing exists in `(0, theta_max]`; the
/// third column then tells whether the forward channel wins (1) or loses (0)
/// over the whole window.
pub fn n_sweep(
    base: &ScatterGeometry,
    n_values: &[u64],
    theta_max: f64,
    tol: Tolerances,
) -> Result<ScanTable> {
    if n_values.is_empty() {
        return Err(Error::InvalidInput("atom-number sweep needs at least one value".into()));
    }
    if n_values.contains(&0) {
        return Err(Error::InvalidInput("atom numbers must be at least 1".into()));
    }
    let rows: Vec<Result<CriticalAngleResult>> = n_values
        .par_iter()
        .map(|&n| critical_angle(&base.with_atoms(n)?, theta_max, tol))
        .collect();

    let mut table = ScanTable::new(["n", "theta_star", "superradiant_at_zero"]);
    for (&n, row) in n_values.iter().zip(rows) {
        let n = n as f64;
        match row {
            Ok(r) => match r.theta_star {
                Some(t) => table.push_values(&[n, t, 1.0]),
                None if r.dominated_everywhere => table.push(
                    vec![Some(n), None, Some(0.0)],
                    RowStatus::Absent("isotropic channel dominates at all angles".into()),
                ),
                None => table.push(
                    vec![Some(n), None, Some(1.0)],
                    RowStatus::Absent("superradiance dominates the whole window".into()),
                ),
            },
            Err(e) => table.push(vec![Some(n), None, None], RowStatus::Failed(e.to_string())),
        }
    }
    table.set_meta("theta_max", theta_max);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn base() -> ScatterGeometry {
        ScatterGeometry::matched(BecCloud::new(50.0, 100.0).unwrap()).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn short_cloud_channel_ratio() {
        let r = channel_rates(&base().with_atoms(10).unwrap(), tol()).unwrap();
        assert!((r.xi / (2.0 / 3.0) - 1.0).abs() < 5e-3);
        assert!((r.xi0_sq / 0.25 - 1.0).abs() < 1e-2);
        let ratio = r.forward_prefactor / r.side_prefactor;
        assert!((ratio / 3.75 - 1.0).abs() < 0.02);
        assert_eq!(r.side_prefactor, 10.0 * r.cross_section_ratio * r.xi);
    }

    #[test]
    fn single_atom_ratio() {
        let r = channel_rates(&base(), tol()).unwrap();
        let ratio = r.forward_prefactor / r.side_prefactor;
        assert!((ratio - r.xi0_sq / r.xi).abs() < 1e-15);
        assert!((ratio / 0.375 - 1.0).abs() < 0.02);
    }

    #[test]
    fn cross_section_ratio_value() {
        // (6 pi / k^2) / (pi w0^2 / 4) with k = 1, w0 = sqrt(2) 50
        let expected = (6.0 * std::f64::consts::PI) / (std::f64::consts::PI * 5000.0 / 4.0);
        assert!((cross_section_ratio(&base()) - expected).abs() < 1e-18);
        assert!((cross_section_ratio(&base()) - 4.8e-3).abs() < 1e-15);
    }

    #[test]
    fn scaling_with_atom_number() {
        for n in [1u64, 3, 10, 1000] {
            let a = channel_rates(&base().with_atoms(n).unwrap(), tol()).unwrap();
            let b = channel_rates(&base().with_atoms(2 * n).unwrap(), tol()).unwrap();
            assert!((b.side_prefactor - 2.0 * a.side_prefactor).abs() <= 1e-12 * b.side_prefactor);
            assert!((b.forward_prefactor - 4.0 * a.forward_prefactor).abs() <= 1e-12 * b.forward_prefactor);
        }
    }

    #[test]
    fn side_rate_ignores_angle() {
        let rates: Vec<f64> = [0.0, 0.3, 1.0]
            .iter()
            .map(|&t| channel_rates(&base().with_theta(t).unwrap(), tol()).unwrap().side_prefactor)
            .collect();
        assert!(rates.iter().all(|r| r.to_bits() == rates[0].to_bits()));
    }

    #[test]
    fn two_atoms_never_win() {
        let r = critical_angle(&base().with_atoms(2).unwrap(), DEFAULT_THETA_WINDOW, tol()).unwrap();
        assert!(r.dominated_everywhere);
        assert!(r.theta_star.is_none());
    }

    #[test]
    fn three_atoms_cross_against_dense_scan() {
        let g = base().with_atoms(3).unwrap();
        let r = critical_angle(&g, DEFAULT_THETA_WINDOW, tol()).unwrap();
        let theta_star = r.theta_star.expect("crossing exists for N = 3");
        assert!(!r.dominated_everywhere);
        assert!(theta_star > 0.0 && theta_star < DEFAULT_THETA_WINDOW);

        // 10^4-point scan oracle
        let side = xi(&g, tol()).unwrap().exact;
        let n = 10_000;
        let h = DEFAULT_THETA_WINDOW / n as f64;
        let first_negative = (0..=n)
            .find(|&i| 3.0 * xi0(&g.with_theta(h * i as f64).unwrap(), tol()).unwrap().magnitude_sq() < side)
            .unwrap();
        let scan_root = h * first_negative as f64;
        assert!(theta_star <= scan_root && theta_star >= scan_root - h);

        // local crossing property
        let just_below = g.with_theta(theta_star * 0.99).unwrap();
        let just_above = g.with_theta(theta_star * 1.01).unwrap();
        assert!(3.0 * xi0(&just_below, tol()).unwrap().magnitude_sq() > side);
        assert!(3.0 * xi0(&just_above, tol()).unwrap().magnitude_sq() < side);
    }

    #[test]
    fn crossing_for_ten_atoms_balances_channels() {
        let g = base().with_atoms(10).unwrap();
        let r = critical_angle(&g, DEFAULT_THETA_WINDOW, tol()).unwrap();
        let at = channel_rates(&g.with_theta(r.theta_star.unwrap()).unwrap(), tol()).unwrap();
        assert!((at.forward_prefactor - at.side_prefactor).abs() <= 1e-8 * at.side_prefactor);
    }

    #[test]
    fn critical_angle_rejects_bad_window() {
        assert!(critical_angle(&base(), 0.0, tol()).is_err());
        assert!(critical_angle(&base(), 2.0, tol()).is_err());
    }

    #[test]
    fn superradiance_over_whole_window() {
        let r = critical_angle(&base().with_atoms(10_000).unwrap(), 0.01, tol()).unwrap();
        assert!(r.theta_star.is_none());
        assert!(!r.dominated_everywhere);
        assert_eq!(r.bracket, (0.0, 0.01));
    }

    #[test]
    fn optimal_waist_short_cloud() {
        let cloud = BecCloud::new(50.0, 100.0).unwrap();
        let best = optimal_waist(&cloud, 10, 0.0, (12.5, 400.0), tol()).unwrap();
        assert!((best.w0_bar / (SQRT_2 * 50.0) - 1.0).abs() < 5e-3, "{}", best.w0_bar);
        assert!(!best.at_boundary);

        // rescaling the objective leaves the argmax unchanged
        let scaled = maximize_1d(
            |w| Ok(7.3 * forward_prefactor_for_waist(&cloud, 10, 0.0, w, tol())?),
            12.5,
            400.0,
            tol(),
        )
        .unwrap();
        assert!((scaled.argmax - best.w0_bar).abs() <= 1e-6 * best.w0_bar);
    }

    #[test]
    fn optimal_waist_at_boundary() {
        let cloud = BecCloud::new(50.0, 100.0).unwrap();
        let best = optimal_waist(&cloud, 1, 0.0, (150.0, 400.0), tol()).unwrap();
        assert!(best.at_boundary);
        assert_eq!(best.w0_bar, 150.0);
        assert!(optimal_waist(&cloud, 1, 0.0, (10.0, 5.0), tol()).is_err());
    }

    #[test]
    fn theta_scan_rows() {
        let g = base().with_atoms(10).unwrap();
        let t = theta_scan(&g, &[0.0, 0.01, 0.05], tol()).unwrap();
        assert_eq!(t.rows.len(), 3);
        let first = &t.rows[0].values;
        assert!((first[1].unwrap() - 0.25).abs() < 2.5e-3);
        assert!((first[2].unwrap() - 0.0667).abs() < 1e-3);
        let rates = channel_rates(&g, tol()).unwrap();
        assert_eq!(first[1].unwrap(), rates.xi0_sq);
        assert_eq!(first[2].unwrap(), rates.xi / 10.0);
        assert!(theta_scan(&g, &[], tol()).is_err());
        assert!(theta_scan(&g, &[-0.1], tol()).is_err());
    }

    #[test]
    fn elongated_cloud_peaks_off_axis() {
        let g = ScatterGeometry::matched(BecCloud::new(50.0, 2e4).unwrap()).unwrap();
        let thetas: Vec<f64> = (0..=128).map(|i| 0.1 * i as f64 / 128.0).collect();
        let t = theta_scan(&g, &thetas, tol()).unwrap();
        let col: Vec<f64> = t.column("xi0_sq").unwrap().into_iter().map(Option::unwrap).collect();
        let argmax = col.iter().enumerate().fold(0, |b, (i, v)| if *v > col[b] { i } else { b });
        assert!(thetas[argmax] > 0.0);
    }

    #[test]
    fn n_sweep_rows() {
        let t = n_sweep(&base(), &[1, 10, 100, 100], DEFAULT_THETA_WINDOW, tol()).unwrap();
        assert_eq!(t.rows[0].values[1], None);
        assert!(matches!(t.rows[0].status, RowStatus::Absent(_)));
        assert_eq!(t.rows[0].values[2], Some(0.0));
        let a = t.rows[1].values[1].unwrap();
        let b = t.rows[2].values[1].unwrap();
        assert!(b > a);
        assert_eq!(t.rows[2], t.rows[3]);
        assert!(n_sweep(&base(), &[], 0.1, tol()).is_err());
        assert!(n_sweep(&base(), &[0], 0.1, tol()).is_err());
    }
}
