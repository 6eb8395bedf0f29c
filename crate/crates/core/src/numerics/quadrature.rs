//! Adaptive 7/15-point Gauss-Kronrod quadrature over real and complex
//! integrands, with global (largest-error-first) bisection.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::Tolerances;
use crate::error::{Error, Result};

/// Values an integrand may return.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn to_complex(self) -> Complex64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

// Kronrod abscissae on [0, 1]; odd indices are shared with the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const EVALS_PER_PANEL: usize = 15;

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    /// Error estimate was clamped to the roundoff floor.
    roundoff_limited: bool,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Result<Panel<T>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = WGK[7] * f_center.magnitude();
    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        fv1[j] = lo;
        fv2[j] = hi;
        let sum = lo + hi;
        kronrod = kronrod + sum * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + sum * WG[j / 2];
        }
        res_abs += WGK[j] * (lo.magnitude() + hi.magnitude());
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).magnitude();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }

    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((kronrod - gauss) * half).magnitude();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    let roundoff_limited = res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor >= error;
    if roundoff_limited {
        error = floor;
    }

    if !value.magnitude().is_finite() || !error.is_finite() {
        return Err(Error::Domain(format!("integrand is not finite on [{a}, {b}]")));
    }
    Ok(Panel { a, b, value, error, roundoff_limited })
}

/// Number of equal initial panels giving at least four panels per period of
/// a phase advancing at `angular_frequency` radians per unit length.
pub fn panels_for_oscillation(length: f64, angular_frequency: f64) -> usize {
    let periods = length * angular_frequency.abs() / std::f64::consts::TAU;
    (4.0 * periods).ceil().max(1.0) as usize
}

/// Integrates `f` over `[a, b]` starting from a single panel.
pub fn integrate_adaptive<T, F>(f: F, a: f64, b: f64, tol: Tolerances) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_adaptive_panels(f, a, b, tol, 1)
}

/// Integrates `f` over `[a, b]`, first splitting the interval into
/// `initial_panels` equal panels and then bisecting the panel with the
/// largest error estimate until the summed estimate meets `tol`.
pub fn integrate_adaptive_panels<T, F>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerances,
    initial_panels: usize,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInput(format!("integration bounds must satisfy a < b, got [{a}, {b}]")));
    }
    let initial_panels = initial_panels.max(1);
    if initial_panels * EVALS_PER_PANEL > tol.max_evaluations {
        return Err(Error::InvalidInput(format!(
            "{initial_panels} initial panels exceed the budget of {} evaluations",
            tol.max_evaluations
        )));
    }

    let mut heap = BinaryHeap::with_capacity(initial_panels * 2);
    let width = (b - a) / initial_panels as f64;
    for i in 0..initial_panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == initial_panels { b } else { a + width * (i + 1) as f64 };
        heap.push(gauss_kronrod(&f, lo, hi)?);
    }
    let mut evaluations = initial_panels * EVALS_PER_PANEL;
    let (mut value, mut error) = totals(&heap);

    loop {
        if error <= tol.target(value.magnitude()) {
            // confirm against a fresh, ordered summation before accepting
            (value, error) = totals(&heap);
            if error <= tol.target(value.magnitude()) {
                return Ok(QuadratureResult { value, abs_error_estimate: error, evaluations });
            }
        }
        let worst = *heap.peek().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        let exhausted = evaluations + 2 * EVALS_PER_PANEL > tol.max_evaluations;
        let unsplittable = !(worst.a < mid && mid < worst.b);
        if exhausted || unsplittable || worst.roundoff_limited {
            let (value, error) = totals(&heap);
            return Err(Error::NonConvergence {
                estimate: value.to_complex(),
                abs_error: error,
                evaluations,
            });
        }
        heap.pop();
        let left = gauss_kronrod(&f, worst.a, mid)?;
        let right = gauss_kronrod(&f, mid, worst.b)?;
        value = value + (left.value + right.value - worst.value);
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        evaluations += 2 * EVALS_PER_PANEL;
    }
}

// Summed in interval order so the result does not depend on heap layout.
fn totals<T: QuadValue>(heap: &BinaryHeap<Panel<T>>) -> (T, f64) {
    let mut panels: Vec<&Panel<T>> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    panels.iter().fold((T::zero(), 0.0), |(v, e), p| (v + p.value, e + p.error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    /// Composite trapezoid with `n` intervals.
    fn trapezoid<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
        let h = (b - a) / n as f64;
        let mut sum = (f(a) + f(b)) * 0.5;
        for i in 1..n {
            sum += f(a + h * i as f64);
        }
        sum * h
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_adaptive(|x: f64| x * x, 0.0, 1.0, tol()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() <= 1e-12);
        assert!(r.abs_error_estimate >= 0.0);
        assert!(r.evaluations >= EVALS_PER_PANEL);
    }

    #[test]
    fn gaussian_normalization() {
        let f = |z: f64| (-z * z / 2.0).exp() / (2.0 * PI).sqrt();
        let r = integrate_adaptive(f, -8.0, 8.0, tol()).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn oscillatory_gaussian_against_trapezoid() {
        let omega = 40.0;
        let f = |z: f64| Complex64::new(0.0, omega * z).exp() * (-z * z / 2.0).exp();
        let oracle = trapezoid(f, -10.0, 10.0, 1_000_000);
        let exact = (-omega * omega / 2.0).exp() * (2.0 * PI).sqrt();
        assert!((oracle.re - exact).abs() < 1e-12 && oracle.im.abs() < 1e-12);
        let panels = panels_for_oscillation(20.0, omega);
        let r = integrate_adaptive_panels(f, -10.0, 10.0, tol(), panels).unwrap();
        assert!((r.value - oracle).norm() <= 1e-9, "{} vs {}", r.value, oracle);
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(matches!(
            integrate_adaptive(|x: f64| x, 1.0, 0.0, tol()),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            integrate_adaptive(|x: f64| x, 0.0, f64::INFINITY, tol()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn budget_exhaustion_carries_estimate() {
        let tight = Tolerances::new(1e-300, 1e-300, 200).unwrap();
        match integrate_adaptive(|x: f64| x.sqrt(), 0.0, 1.0, tight) {
            Err(Error::NonConvergence { estimate, evaluations, .. }) => {
                assert!((estimate.re - 2.0 / 3.0).abs() < 1e-3);
                assert!(evaluations <= 200);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let r = integrate_adaptive(|x: f64| 1.0 / (x - 0.5), 0.0, 1.0, tol());
        assert!(r.is_err());
    }

    #[test]
    fn oscillation_panel_count() {
        assert_eq!(panels_for_oscillation(1.0, 0.0), 1);
        assert_eq!(panels_for_oscillation(TAU_LEN, 1.0), 4);
    }
    const TAU_LEN: f64 = std::f64::consts::TAU;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn linearity(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, w in 0.5f64..6.0) {
            let f = move |x: f64| (w * x).sin() * (-x * x).exp();
            let g = |x: f64| 1.0 / (1.0 + x * x);
            let rf = integrate_adaptive(f, -2.0, 3.0, tol()).unwrap();
            let rg = integrate_adaptive(g, -2.0, 3.0, tol()).unwrap();
            let rs = integrate_adaptive(move |x: f64| alpha * f(x) + beta * g(x), -2.0, 3.0, tol()).unwrap();
            let combined = alpha.abs() * rf.abs_error_estimate
                + beta.abs() * rg.abs_error_estimate
                + rs.abs_error_estimate
                + 1e-15;
            prop_assert!((rs.value - (alpha * rf.value + beta * rg.value)).abs() <= combined);
        }

        #[test]
        fn mirrored_integrand(a in -5.0f64..0.0, len in 0.1f64..6.0, w in 0.1f64..4.0) {
            let b = a + len;
            let f = move |x: f64| Complex64::new(0.0, w * x).exp() / (1.0 + x * x);
            let direct = integrate_adaptive(f, a, b, tol()).unwrap();
            let mirrored = integrate_adaptive(move |x: f64| f(-x), -b, -a, tol()).unwrap();
            prop_assert!((direct.value - mirrored.value).norm() <= 1e-12);
        }
    }
}
