use super::Tolerances;
use crate::error::{Error, Result};

/// Points in the coarse scan that selects the golden-section bracket.
const PRESCAN_POINTS: usize = 64;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
    /// The maximizer sits on `lo` or `hi`.
    pub at_boundary: bool,
}

/// Maximizes `g` on `[lo, hi]`.
///
/// A uniform pre-scan picks the best grid point; golden-section search then
/// refines inside its two neighbouring cells until the bracket is narrower
/// than `tol.rel_tol * (hi - lo)`.
pub fn maximize_1d<F>(mut g: F, lo: f64, hi: f64, tol: Tolerances) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInput(format!("maximize_1d needs lo < hi, got [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (PRESCAN_POINTS - 1) as f64;
    let grid = |i: usize| if i + 1 == PRESCAN_POINTS { hi } else { lo + step * i as f64 };

    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..PRESCAN_POINTS {
        let v = g(grid(i))?;
        if v.is_nan() {
            return Err(Error::Domain(format!("objective is NaN at {}", grid(i))));
        }
        if v > best.1 {
            best = (i, v);
        }
    }
    let (i_best, scan_value) = best;
    let mut a = grid(i_best.saturating_sub(1));
    let mut b = grid((i_best + 1).min(PRESCAN_POINTS - 1));

    let x_tol = tol.rel_tol * (hi - lo);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c)?;
    let mut gd = g(d)?;
    let mut evaluations = PRESCAN_POINTS + 2;
    while (b - a).abs() > x_tol && evaluations < tol.max_evaluations {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d)?;
        }
        evaluations += 1;
    }
    let (mut argmax, mut value) = if gc >= gd { (c, gc) } else { (d, gd) };
    if scan_value > value {
        argmax = grid(i_best);
        value = scan_value;
    }
    Ok(Maximum { argmax, value, at_boundary: argmax == lo || argmax == hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::new(1e-12, 1e-12, 10_000).unwrap()
    }

    #[test]
    fn downward_parabola() {
        let m = maximize_1d(|x| Ok(-(x - 3.0) * (x - 3.0)), 0.0, 10.0, tol()).unwrap();
        assert!((m.argmax - 3.0).abs() <= 1e-8);
        assert!(!m.at_boundary);
    }

    #[test]
    fn analytic_waist_limit() {
        // d/dw [w^2 / (2 s^2 + w^2)^2] = 0  =>  w^2 = 2 s^2
        let s = 1.0;
        let g = |w: f64| Ok(w * w / (2.0 * s * s + w * w).powi(2));
        let m = maximize_1d(g, 0.1, 10.0, tol()).unwrap();
        assert!((m.argmax - std::f64::consts::SQRT_2).abs() <= 1e-6);
    }

    #[test]
    fn monotone_objective_hits_boundary() {
        let m = maximize_1d(|x| Ok(-x), 3.0, 9.0, tol()).unwrap();
        assert_eq!(m.argmax, 3.0);
        assert!(m.at_boundary);
        let m = maximize_1d(Ok, 3.0, 9.0, tol()).unwrap();
        assert_eq!(m.argmax, 9.0);
        assert!(m.at_boundary);
    }

    #[test]
    fn rejects_empty_range() {
        assert!(maximize_1d(Ok, 1.0, 1.0, tol()).is_err());
    }

    proptest! {
        #[test]
        fn affine_reparameterization(scale in 0.1f64..10.0, shift in -5.0f64..5.0) {
            let g = |x: f64| -(x - 1.7).powi(2) + 0.3 * (x - 1.7).powi(3);
            let direct = maximize_1d(|x| Ok(g(x)), 0.0, 3.0, tol()).unwrap();
            let mapped = maximize_1d(|u| Ok(g(scale * u + shift)), -shift / scale, (3.0 - shift) / scale, tol()).unwrap();
            prop_assert!((scale * mapped.argmax + shift - direct.argmax).abs() <= 1e-7);
        }

        #[test]
        fn positive_rescaling_keeps_argmax(k in 0.01f64..100.0) {
            let g = |x: f64| x * (-x).exp();
            let a = maximize_1d(|x| Ok(g(x)), 0.0, 5.0, tol()).unwrap();
            let b = maximize_1d(|x| Ok(k * g(x)), 0.0, 5.0, tol()).unwrap();
            prop_assert!((a.argmax - b.argmax).abs() <= 1e-7);
        }
    }
}
