//! Built-in verification suites run by `bec-collect selfcheck`.
//!
//! Each suite re-derives a known limit or compares two independent
//! evaluations of the same quantity, and reports one line.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use crate::geometry::{xi, xi0, xi0_forward_closed, xi_brute_3d};
use crate::numerics::Tolerances;
use crate::optics::{BecCloud, ScatterGeometry};
use crate::pulses::{epsilon_amplitude, uniform_grid, PulseEnvelope};
use crate::rates::{channel_rates, critical_angle, n_sweep, optimal_waist, theta_scan, DEFAULT_THETA_WINDOW};

type Check = fn() -> Result<String, String>;

pub struct Suite {
    pub id: u32,
    pub name: &'static str,
    check: Check,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

pub const SUITES: &[Suite] = &[
    Suite { id: 1, name: "short-cloud limits", check: limits },
    Suite { id: 2, name: "forward closed form vs quadrature", check: closed_form },
    Suite { id: 3, name: "3D grid vs 1D side factor", check: brute_force },
    Suite { id: 4, name: "optimal waist", check: waist },
    Suite { id: 5, name: "critical angle vs atom number", check: critical },
    Suite { id: 6, name: "forward-lobe maximum", check: lobe },
    Suite { id: 7, name: "atom-number scaling", check: scaling },
    Suite { id: 8, name: "readout amplitude", check: pulses },
];

pub fn run_suite(suite: &Suite) -> SuiteOutcome {
    let start = Instant::now();
    let result = (suite.check)();
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    SuiteOutcome { id: suite.id, name: suite.name, passed, detail, seconds }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn default_geometry() -> Result<ScatterGeometry, String> {
    let cloud = BecCloud::new(50.0, 100.0).map_err(|e| e.to_string())?;
    ScatterGeometry::matched(cloud).map_err(|e| e.to_string())
}

fn ensure(ok: bool, detail: String) -> Result<String, String> {
    if ok { Ok(detail) } else { Err(detail) }
}

macro_rules! tryc {
    ($e:expr) => {
        $e.map_err(|e| e.to_string())?
    };
}

fn limits() -> Result<String, String> {
    let g = default_geometry()?;
    let side = tryc!(xi(&g, tol())).exact;
    let fwd = tryc!(xi0(&g, tol())).magnitude_sq();
    let (e1, e2) = ((side / (2.0 / 3.0) - 1.0).abs(), (fwd / 0.25 - 1.0).abs());
    ensure(e1 < 5e-3 && e2 < 1e-2, format!("xi = {side:.6} (rel dev {e1:.2e}), |xi0|^2 = {fwd:.6} (rel dev {e2:.2e})"))
}

fn closed_form() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            let sigma = 10.0 + 190.0 * i as f64 / 4.0;
            let sigma_z = 10.0 + 4990.0 * j as f64 / 4.0;
            let g = tryc!(ScatterGeometry::matched(tryc!(BecCloud::new(sigma, sigma_z))));
            let closed = xi0_forward_closed(g.beam(), g.cloud()).norm();
            let quad = tryc!(xi0(&g, tol())).value.norm();
            worst = worst.max((closed - quad).abs() / closed);
        }
    }
    ensure(worst < 1e-8, format!("max rel deviation {worst:.2e} over 25 geometries"))
}

fn brute_force() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for sigma_z in [100.0, 1000.0, 5000.0] {
        let g = tryc!(ScatterGeometry::matched(tryc!(BecCloud::new(50.0, sigma_z))));
        let reduced = tryc!(xi(&g, tol())).exact;
        let grid = tryc!(xi_brute_3d(&g, 256));
        worst = worst.max((grid / reduced - 1.0).abs());
    }
    ensure(worst < 1e-4, format!("max rel deviation {worst:.2e} at 256 points per axis"))
}

fn waist() -> Result<String, String> {
    let cloud = tryc!(BecCloud::new(50.0, 100.0));
    let best = tryc!(optimal_waist(&cloud, 10, 0.0, (12.5, 400.0), tol()));
    let ratio = best.w0_bar / (SQRT_2 * 50.0);
    ensure((ratio - 1.0).abs() < 5e-3 && !best.at_boundary, format!("w0 / (sqrt2 sigma) = {ratio:.5}"))
}

fn critical() -> Result<String, String> {
    let g = default_geometry()?;
    let table = tryc!(n_sweep(&g, &[10, 100, 1000, 10_000], DEFAULT_THETA_WINDOW, tol()));
    let thetas: Vec<Option<f64>> = table.column("theta_star").unwrap_or_default();
    let all = thetas.iter().all(Option::is_some);
    let values: Vec<f64> = thetas.iter().flatten().copied().collect();
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let two = tryc!(critical_angle(&tryc!(g.with_atoms(2)), DEFAULT_THETA_WINDOW, tol()));
    let shown: Vec<String> = values.iter().map(|t| format!("{t:.4}")).collect();
    ensure(
        all && increasing && two.dominated_everywhere,
        format!("theta* = [{}], N = 2 dominated: {}", shown.join(", "), two.dominated_everywhere),
    )
}

fn argmax_theta(sigma_z: f64) -> Result<f64, String> {
    let g = tryc!(ScatterGeometry::matched(tryc!(BecCloud::new(50.0, sigma_z))));
    let thetas: Vec<f64> = (0..512).map(|i| 0.1 * i as f64 / 511.0).collect();
    let table = tryc!(theta_scan(&g, &thetas, tol()));
    let col = table.column("xi0_sq").unwrap_or_default();
    let mut best = 0;
    for (i, v) in col.iter().enumerate() {
        let v = v.ok_or_else(|| format!("scan row {i} failed"))?;
        if v > col[best].unwrap_or(f64::NEG_INFINITY) {
            best = i;
        }
    }
    Ok(thetas[best])
}

fn lobe() -> Result<String, String> {
    let short = argmax_theta(100.0)?;
    let long = argmax_theta(5000.0)?;
    ensure(short == 0.0 && long > 0.0, format!("argmax at {short:.5} (sigma_z 100), {long:.5} (sigma_z 5000)"))
}

fn scaling() -> Result<String, String> {
    let g = default_geometry()?;
    let mut worst: f64 = 0.0;
    for n in [1u64, 10, 1000] {
        let a = tryc!(channel_rates(&tryc!(g.with_atoms(n)), tol()));
        let b = tryc!(channel_rates(&tryc!(g.with_atoms(2 * n)), tol()));
        worst = worst
            .max((b.side_prefactor / (2.0 * a.side_prefactor) - 1.0).abs())
            .max((b.forward_prefactor / (4.0 * a.forward_prefactor) - 1.0).abs());
    }
    let sides: Vec<u64> = [0.0, 0.05, 1.0]
        .iter()
        .map(|&t| Ok(tryc!(channel_rates(&tryc!(g.with_theta(t)), tol())).side_prefactor.to_bits()))
        .collect::<Result<_, String>>()?;
    let flat = sides.iter().all(|&b| b == sides[0]);
    ensure(worst <= 1e-12 && flat, format!("max rel deviation {worst:.1e}, side rate angle independent: {flat}"))
}

fn pulses() -> Result<String, String> {
    let c = tryc!(PulseEnvelope::constant(1.0));
    let trace = tryc!(epsilon_amplitude(&c, &c, &tryc!(uniform_grid(4.0, 64))));
    let mut worst: f64 = 0.0;
    for (i, t) in [(16, 1.0), (32, 2.0), (64, 4.0)] {
        worst = worst.max((trace.epsilon[i].re + t * t / 2.0).abs());
    }
    let drive = tryc!(PulseEnvelope::gaussian(1.0, 2.0, 0.5));
    let readout = tryc!(PulseEnvelope::gaussian(1.0, 2.2, 0.4));
    let finals: Vec<f64> = [50, 100, 200]
        .iter()
        .map(|&n| Ok(tryc!(epsilon_amplitude(&drive, &readout, &tryc!(uniform_grid(2.3, n)))).epsilon[n].re))
        .collect::<Result<_, String>>()?;
    let order = ((finals[1] - finals[0]) / (finals[2] - finals[1])).abs().log2();
    ensure(worst < 1e-10 && order >= 1.9, format!("constant-envelope error {worst:.1e}, observed order {order:.2}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_one_through_eight() {
        let ids: Vec<u32> = SUITES.iter().map(|s| s.id).collect();
        assert_eq!(ids, (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn fast_suites_pass() {
        for id in [1, 4, 7, 8] {
            let outcome = run_suite(&SUITES[id - 1]);
            assert!(outcome.passed, "{outcome}");
            assert!(outcome.to_string().starts_with("[PASS]"));
        }
    }
}
