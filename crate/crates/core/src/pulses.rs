//! Perturbative readout amplitude
//!
//! ```text
//! eps(t) = -∫_0^t dt' Omega(t') ∫_0^t' dt'' eta(t'')
//! ```
//!
//! with `eta` the microwave drive and `Omega` the Raman laser. The overall
//! sign only matters through `|eps|^2`.
//!
//! The inner integral is evaluated from the antiderivative of each envelope
//! shape, so it is exact at every time. The outer integral is a composite
//! trapezoid on the caller's grid, split at the envelopes' kinks and jumps.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{erf, erfc};

/// Grid points required per envelope feature width before a warning is raised.
pub const MIN_POINTS_PER_FEATURE: f64 = 8.0;
/// `|eps|^2 N` above which the leading-order amplitude is no longer trusted.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum EnvelopeShape {
    Constant,
    /// 1 on `[t_on, t_off]`, 0 elsewhere.
    Rectangular { t_on: f64, t_off: f64 },
    /// `exp(-(t - t0)^2 / (2 width^2))`
    Gaussian { t0: f64, width: f64 },
    /// Linear interpolation between samples, 0 outside the sampled span.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseEnvelope {
    shape: EnvelopeShape,
    amplitude_scale: f64,
}

impl PulseEnvelope {
    pub fn new(shape: EnvelopeShape, amplitude_scale: f64) -> Result<Self> {
        if !amplitude_scale.is_finite() {
            return Err(Error::InvalidInput(format!("amplitude must be finite, got {amplitude_scale}")));
        }
        match &shape {
            EnvelopeShape::Constant => {}
            EnvelopeShape::Rectangular { t_on, t_off } => {
                if !(t_on.is_finite() && t_off.is_finite() && t_on < t_off) {
                    return Err(Error::InvalidInput(format!("rectangle needs t_on < t_off, got [{t_on}, {t_off}]")));
                }
            }
            EnvelopeShape::Gaussian { t0, width } => {
                if !(t0.is_finite() && *width > 0.0 && width.is_finite()) {
                    return Err(Error::InvalidInput(format!("gaussian needs finite t0 and width > 0, got ({t0}, {width})")));
                }
            }
            EnvelopeShape::Sampled { times, values } => {
                if times.len() < 2 || times.len() != values.len() {
                    return Err(Error::InvalidInput(format!(
                        "sampled envelope needs >= 2 matching samples, got {} times and {} values",
                        times.len(),
                        values.len()
                    )));
                }
                if times.windows(2).any(|w| w[0] >= w[1]) || times.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("sampled times must be finite and strictly increasing".into()));
                }
            }
        }
        Ok(Self { shape, amplitude_scale })
    }

    pub fn constant(amplitude: f64) -> Result<Self> {
        Self::new(EnvelopeShape::Constant, amplitude)
    }

    pub fn rectangular(amplitude: f64, t_on: f64, t_off: f64) -> Result<Self> {
        Self::new(EnvelopeShape::Rectangular { t_on, t_off }, amplitude)
    }

    pub fn gaussian(amplitude: f64, t0: f64, width: f64) -> Result<Self> {
        Self::new(EnvelopeShape::Gaussian { t0, width }, amplitude)
    }

    pub fn sampled(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(EnvelopeShape::Sampled { times, values }, 1.0)
    }

    pub fn shape(&self) -> &EnvelopeShape {
        &self.shape
    }

    pub fn amplitude_scale(&self) -> f64 {
        self.amplitude_scale
    }

    /// Same shape, amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.shape.clone(), self.amplitude_scale * factor)
    }

    /// Parses `const:A`, `rect:A:t_on:t_off`, `gauss:A:t0:width` or `file:PATH`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let (kind, rest) = spec.split_once(':').ok_or_else(|| Error::Parse(format!("envelope `{spec}` has no `kind:` prefix")))?;
        if kind == "file" {
            return Self::from_file(Path::new(rest));
        }
        let nums = rest
            .split(':')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("`{s}` in envelope `{spec}` is not a number"))))
            .collect::<Result<Vec<f64>>>()?;
        let arity = |n: usize| {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("envelope `{kind}` takes {n} numbers, got {} in `{spec}`", nums.len())))
            }
        };
        match kind {
            "const" => arity(1).and_then(|_| Self::constant(nums[0])),
            "rect" => arity(3).and_then(|_| Self::rectangular(nums[0], nums[1], nums[2])),
            "gauss" => arity(3).and_then(|_| Self::gaussian(nums[0], nums[1], nums[2])),
            _ => Err(Error::Parse(format!("unknown envelope kind `{kind}` (expected const, rect, gauss or file)"))),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_two_column_text(&text)
    }

    /// Whitespace- or comma-separated `time amplitude` lines; `#` starts a comment.
    pub fn from_two_column_text(text: &str) -> Result<Self> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let parsed: Vec<f64> = fields.iter().filter_map(|f| f.parse().ok()).collect();
            if fields.len() != 2 || parsed.len() != 2 {
                return Err(Error::Parse(format!("line {}: expected two numbers, got `{line}`", lineno + 1)));
            }
            times.push(parsed[0]);
            values.push(parsed[1]);
        }
        Self::sampled(times, values)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.amplitude_scale * self.unit_value(t, Side::Right)
    }

    fn unit_value(&self, t: f64, side: Side) -> f64 {
        match &self.shape {
            EnvelopeShape::Constant => 1.0,
            EnvelopeShape::Rectangular { t_on, t_off } => {
                let inside = match side {
                    Side::Left => t > *t_on && t <= *t_off,
                    Side::Right => t >= *t_on && t < *t_off,
                };
                if inside { 1.0 } else { 0.0 }
            }
            EnvelopeShape::Gaussian { t0, width } => {
                let u = (t - t0) / width;
                (-0.5 * u * u).exp()
            }
            EnvelopeShape::Sampled { times, values } => interpolate(times, values, t),
        }
    }

    /// `∫_0^t` of the envelope, from its antiderivative.
    pub fn integral_from_zero(&self, t: f64) -> f64 {
        let unit = match &self.shape {
            EnvelopeShape::Constant => t,
            EnvelopeShape::Rectangular { t_on, t_off } => {
                let clamp = |x: f64| x.clamp(*t_on, *t_off);
                clamp(t) - clamp(0.0)
            }
            EnvelopeShape::Gaussian { t0, width } => {
                let s = std::f64::consts::SQRT_2 * width;
                width * (std::f64::consts::PI / 2.0).sqrt() * erf_difference(-t0 / s, (t - t0) / s)
            }
            EnvelopeShape::Sampled { times, values } => sampled_integral(times, values, t) - sampled_integral(times, values, 0.0),
        };
        self.amplitude_scale * unit
    }

    /// Times where the envelope has a jump or kink.
    fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            EnvelopeShape::Constant | EnvelopeShape::Gaussian { .. } => Vec::new(),
            EnvelopeShape::Rectangular { t_on, t_off } => vec![*t_on, *t_off],
            EnvelopeShape::Sampled { times, .. } => times.clone(),
        }
    }

    /// Shortest time scale on which the envelope changes.
    fn feature_width(&self) -> Option<f64> {
        match &self.shape {
            EnvelopeShape::Constant => None,
            EnvelopeShape::Rectangular { t_on, t_off } => Some(t_off - t_on),
            EnvelopeShape::Gaussian { width, .. } => Some(*width),
            EnvelopeShape::Sampled { times, .. } => Some(times[times.len() - 1] - times[0]),
        }
    }
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

/// `erf(b) - erf(a)` without cancellation when both lie in the same tail.
fn erf_difference(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        erfc(a) - erfc(b)
    } else if a < 0.0 && b < 0.0 {
        erfc(-b) - erfc(-a)
    } else {
        erf(b) - erf(a)
    }
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let last = times.len() - 1;
    if t < times[0] || t > times[last] {
        return 0.0;
    }
    let i = times.partition_point(|&x| x <= t).clamp(1, last);
    let (t0, t1) = (times[i - 1], times[i]);
    values[i - 1] + (values[i] - values[i - 1]) * (t - t0) / (t1 - t0)
}

/// `∫_{-inf}^t` of the interpolant.
fn sampled_integral(times: &[f64], values: &[f64], t: f64) -> f64 {
    if t <= times[0] {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 1..times.len() {
        let (t0, t1) = (times[i - 1], times[i]);
        if t >= t1 {
            total += 0.5 * (values[i - 1] + values[i]) * (t1 - t0);
        } else {
            let v = interpolate(times, values, t);
            total += 0.5 * (values[i - 1] + v) * (t - t0);
            break;
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeTrace {
    pub times: Vec<f64>,
    pub epsilon: Vec<Complex64>,
    pub n_atoms: u64,
    pub warnings: Vec<String>,
}

impl AmplitudeTrace {
    /// Attaches an atom number and flags the trace if it leaves the perturbative regime.
    pub fn with_atoms(mut self, n_atoms: u64) -> Self {
        self.n_atoms = n_atoms;
        if let Some(i) = self.first_nonperturbative_index() {
            self.warnings.push(format!(
                "|eps|^2 N exceeds {PERTURBATIVE_LIMIT} from t = {} on; leading-order amplitude is unreliable",
                self.times[i]
            ));
        }
        self
    }

    pub fn exceeds_perturbative_limit(&self) -> bool {
        self.first_nonperturbative_index().is_some()
    }

    fn first_nonperturbative_index(&self) -> Option<usize> {
        let n = self.n_atoms as f64;
        self.epsilon.iter().position(|e| e.norm_sqr() * n > PERTURBATIVE_LIMIT)
    }
}

/// Readout amplitude on `times` for microwave drive `eta` and laser `omega`.
///
/// `times` must start at 0 and increase strictly. A grid coarser than
/// [`MIN_POINTS_PER_FEATURE`] points per envelope feature produces a
/// warning on the trace rather than an error.
pub fn epsilon_amplitude(drive: &PulseEnvelope, readout: &PulseEnvelope, times: &[f64]) -> Result<AmplitudeTrace> {
    if times.is_empty() || times[0] != 0.0 {
        return Err(Error::InvalidInput("time grid must start at 0".into()));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("time grid must be finite and strictly increasing".into()));
    }

    let mut warnings = Vec::new();
    let max_step = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    for (name, env) in [("drive", drive), ("readout", readout)] {
        if let Some(width) = env.feature_width() {
            if max_step > width / MIN_POINTS_PER_FEATURE {
                warnings.push(format!(
                    "{name} envelope: grid step {max_step} gives fewer than {MIN_POINTS_PER_FEATURE} points per feature width {width}"
                ));
            }
        }
    }

    let integrand = |t: f64, side: Side| readout.amplitude_scale * readout.unit_value(t, side) * drive.integral_from_zero(t);
    let mut breaks = readout.breakpoints();
    breaks.extend(drive.breakpoints());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut epsilon = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    epsilon.push(Complex64::new(0.0, 0.0));
    for w in times.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut left = a;
        for &p in breaks.iter().filter(|&&p| p > a && p < b) {
            acc += 0.5 * (p - left) * (integrand(left, Side::Right) + integrand(p, Side::Left));
            left = p;
        }
        acc += 0.5 * (b - left) * (integrand(left, Side::Right) + integrand(b, Side::Left));
        epsilon.push(Complex64::new(-acc, 0.0));
    }
    Ok(AmplitudeTrace { times: times.to_vec(), epsilon, n_atoms: 1, warnings })
}

/// `|eps(t)|^2` at each grid point.
pub fn perturbative_population(trace: &AmplitudeTrace) -> Vec<f64> {
    trace.epsilon.iter().map(|e| e.norm_sqr()).collect()
}

/// `n + 1` equally spaced times on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) || n == 0 {
        return Err(Error::InvalidInput(format!("grid needs t_max > 0 and at least one step, got ({t_max}, {n})")));
    }
    Ok((0..=n).map(|i| t_max * i as f64 / n as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn final_eps(drive: &PulseEnvelope, readout: &PulseEnvelope, t: f64, n: usize) -> f64 {
        epsilon_amplitude(drive, readout, &uniform_grid(t, n).unwrap()).unwrap().epsilon[n].re
    }

    /// Independent nested cumulative trapezoid on a dense grid.
    fn dense_oracle(eta: impl Fn(f64) -> f64, omega: impl Fn(f64) -> f64, t_max: f64, n: usize) -> f64 {
        let h = t_max / n as f64;
        let (mut inner, mut outer) = (0.0, 0.0);
        let mut prev = omega(0.0) * 0.0;
        for i in 1..=n {
            let (t0, t1) = (h * (i - 1) as f64, h * i as f64);
            inner += 0.5 * h * (eta(t0) + eta(t1));
            let cur = omega(t1) * inner;
            outer += 0.5 * h * (prev + cur);
            prev = cur;
        }
        -outer
    }

    #[test]
    fn constant_envelopes() {
        let (o, e) = (1.7, 0.6);
        let drive = PulseEnvelope::constant(e).unwrap();
        let readout = PulseEnvelope::constant(o).unwrap();
        let trace = epsilon_amplitude(&drive, &readout, &uniform_grid(4.0, 40).unwrap()).unwrap();
        for (i, t) in [(10, 1.0), (20, 2.0), (40, 4.0)] {
            assert!((trace.epsilon[i].re + o * e * t * t / 2.0).abs() < 1e-10);
            assert_eq!(trace.epsilon[i].im, 0.0);
            let pop = perturbative_population(&trace)[i];
            assert!((pop - t.powi(4) * (o * e).powi(2) / 4.0).abs() < 1e-10);
        }
        assert_eq!(trace.epsilon[0], Complex64::new(0.0, 0.0));
        assert!(trace.warnings.is_empty());
    }

    #[test]
    fn rectangular_drive() {
        let (o, e, big_t) = (1.3, 0.8, 1.5);
        let drive = PulseEnvelope::rectangular(e, 0.0, big_t).unwrap();
        let readout = PulseEnvelope::constant(o).unwrap();
        for t in [2.0, 3.7, 5.0] {
            let expected = -o * e * (big_t * t - big_t * big_t / 2.0);
            let got = final_eps(&drive, &readout, t, 97);
            assert!((got - expected).abs() < 1e-12 * expected.abs(), "{got} vs {expected}");
            let oracle = dense_oracle(|x| if x <= big_t { e } else { 0.0 }, |_| o, t, 100_000);
            assert!((oracle - expected).abs() < 1e-4 * expected.abs());
        }
    }

    #[test]
    fn rectangular_readout_off_grid() {
        // readout switches on and off between grid points
        let drive = PulseEnvelope::constant(1.0).unwrap();
        let readout = PulseEnvelope::rectangular(1.0, 0.33, 1.21).unwrap();
        let got = final_eps(&drive, &readout, 2.0, 20);
        assert!((got + (1.21f64.powi(2) - 0.33f64.powi(2)) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_envelopes_against_dense_oracle() {
        let drive = PulseEnvelope::gaussian(0.9, 3.0, 0.5).unwrap();
        let readout = PulseEnvelope::gaussian(1.4, 4.0, 0.7).unwrap();
        let got = final_eps(&drive, &readout, 10.0, 400);
        let g = |a: f64, t0: f64, w: f64| move |t: f64| a * (-0.5 * ((t - t0) / w).powi(2)).exp();
        let oracle = dense_oracle(g(0.9, 3.0, 0.5), g(1.4, 4.0, 0.7), 10.0, 1_000_000);
        assert!((got - oracle).abs() < 1e-8 * oracle.abs(), "{got} vs {oracle}");
    }

    #[test]
    fn second_order_convergence() {
        let drive = PulseEnvelope::gaussian(1.0, 2.0, 0.5).unwrap();
        let readout = PulseEnvelope::gaussian(1.0, 2.2, 0.4).unwrap();
        let e: Vec<f64> = [50, 100, 200, 400].iter().map(|&n| final_eps(&drive, &readout, 2.3, n)).collect();
        let d1 = (e[1] - e[0]).abs();
        let d2 = (e[2] - e[1]).abs();
        let d3 = (e[3] - e[2]).abs();
        assert!(d1 / d2 > 3.5 && d2 / d3 > 3.5, "ratios {} {}", d1 / d2, d2 / d3);
    }

    #[test]
    fn sampled_envelope_matches_analytic_shape() {
        // a linear ramp is represented exactly by two samples
        let drive = PulseEnvelope::from_two_column_text("# t eta\n0 0\n2.0, 4.0 # ramp\n\n").unwrap();
        let readout = PulseEnvelope::constant(1.0).unwrap();
        // eta = 2t, ∫eta = t^2, eps(2) = -8/3
        let got = final_eps(&drive, &readout, 2.0, 400);
        assert!((got + 8.0 / 3.0).abs() < 1e-4);
        assert_eq!(drive.value(3.0), 0.0);
        assert!((drive.integral_from_zero(5.0) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_integral_in_far_tail() {
        let g = PulseEnvelope::gaussian(1.0, 50.0, 1.0).unwrap();
        let t = 40.0;
        // ∫_0^40 exp(-(t-50)^2/2) ~ exp(-50) / 10 to leading order
        let v = g.integral_from_zero(t);
        assert!(v > 0.0 && (v / ((-50.0f64).exp() / 10.0) - 1.0).abs() < 0.02);
    }

    #[test]
    fn zero_drive_gives_zero() {
        let drive = PulseEnvelope::constant(0.0).unwrap();
        let readout = PulseEnvelope::gaussian(2.0, 1.0, 0.3).unwrap();
        let trace = epsilon_amplitude(&drive, &readout, &uniform_grid(3.0, 64).unwrap()).unwrap();
        assert!(perturbative_population(&trace).iter().all(|&p| p == 0.0));
    }

    #[test]
    fn coarse_grid_warns() {
        let drive = PulseEnvelope::gaussian(1.0, 2.0, 0.1).unwrap();
        let readout = PulseEnvelope::constant(1.0).unwrap();
        let trace = epsilon_amplitude(&drive, &readout, &uniform_grid(4.0, 16).unwrap()).unwrap();
        assert_eq!(trace.warnings.len(), 1);
        assert!(trace.warnings[0].contains("drive"));
    }

    #[test]
    fn perturbative_guard() {
        let c = PulseEnvelope::constant(0.1).unwrap();
        let trace = epsilon_amplitude(&c, &c, &uniform_grid(4.0, 40).unwrap()).unwrap();
        // |eps(4)|^2 = (0.01 * 8)^2 = 6.4e-3
        assert!(!trace.clone().with_atoms(10).exceeds_perturbative_limit());
        let flagged = trace.with_atoms(100);
        assert!(flagged.exceeds_perturbative_limit());
        assert_eq!(flagged.warnings.len(), 1);
    }

    #[test]
    fn rejects_bad_grids_and_envelopes() {
        let c = PulseEnvelope::constant(1.0).unwrap();
        assert!(epsilon_amplitude(&c, &c, &[]).is_err());
        assert!(epsilon_amplitude(&c, &c, &[0.5, 1.0]).is_err());
        assert!(epsilon_amplitude(&c, &c, &[0.0, 1.0, 1.0]).is_err());
        assert!(PulseEnvelope::rectangular(1.0, 2.0, 1.0).is_err());
        assert!(PulseEnvelope::gaussian(1.0, 0.0, 0.0).is_err());
        assert!(PulseEnvelope::sampled(vec![0.0], vec![1.0]).is_err());
        assert!(PulseEnvelope::sampled(vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(uniform_grid(0.0, 4).is_err());
    }

    #[test]
    fn parses_specs() {
        assert_eq!(PulseEnvelope::parse_spec("const:2.5").unwrap(), PulseEnvelope::constant(2.5).unwrap());
        assert_eq!(
            PulseEnvelope::parse_spec("rect:1:0.5:2").unwrap(),
            PulseEnvelope::rectangular(1.0, 0.5, 2.0).unwrap()
        );
        assert_eq!(
            PulseEnvelope::parse_spec("gauss:1:3:0.5").unwrap(),
            PulseEnvelope::gaussian(1.0, 3.0, 0.5).unwrap()
        );
        for bad in ["const", "const:x", "rect:1:2", "sine:1", "gauss:1:2:-1", "file:/nonexistent/env.txt"] {
            assert!(PulseEnvelope::parse_spec(bad).is_err(), "{bad}");
        }
        assert!(matches!(PulseEnvelope::from_two_column_text("0 1\n1 2 3\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn parses_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eta.txt");
        std::fs::write(&path, "# time amplitude\n0 1\n1 1\n").unwrap();
        let env = PulseEnvelope::parse_spec(&format!("file:{}", path.display())).unwrap();
        assert_eq!(env.value(0.5), 1.0);
    }

    proptest! {
        #[test]
        fn linear_in_each_envelope(a in 0.1f64..2.0, t0 in 0.5f64..3.0, w in 0.2f64..1.0) {
            let drive = PulseEnvelope::gaussian(a, t0, w).unwrap();
            let readout = PulseEnvelope::rectangular(1.0, 0.2, 2.5).unwrap();
            let grid = uniform_grid(4.0, 200).unwrap();
            let base = epsilon_amplitude(&drive, &readout, &grid).unwrap();
            for (d, r) in [(drive.scaled(3.0).unwrap(), readout.clone()), (drive.clone(), readout.scaled(3.0).unwrap())] {
                let scaled = epsilon_amplitude(&d, &r, &grid).unwrap();
                for (x, y) in base.epsilon.iter().zip(&scaled.epsilon) {
                    prop_assert!((y - 3.0 * x).norm() <= 1e-12 * (1.0 + y.norm()));
                }
                let p0 = perturbative_population(&base);
                let p1 = perturbative_population(&scaled);
                for (x, y) in p0.iter().zip(&p1) {
                    prop_assert!((y - 9.0 * x).abs() <= 1e-12 * (1.0 + y));
                }
            }
        }

        #[test]
        fn nonnegative_envelopes_give_growing_amplitude(
            a in 0.0f64..2.0, b in 0.0f64..2.0, t0 in 0.0f64..3.0, w in 0.1f64..1.0, on in 0.0f64..2.0,
        ) {
            let drive = PulseEnvelope::gaussian(a, t0, w).unwrap();
            let readout = PulseEnvelope::rectangular(b, on, on + 1.0).unwrap();
            let trace = epsilon_amplitude(&drive, &readout, &uniform_grid(5.0, 128).unwrap()).unwrap();
            let pop = perturbative_population(&trace);
            prop_assert!(pop.iter().all(|&p| p >= 0.0));
            let mags: Vec<f64> = trace.epsilon.iter().map(|e| e.norm()).collect();
            prop_assert!(mags.windows(2).all(|m| m[1] >= m[0]));
        }
    }
}
