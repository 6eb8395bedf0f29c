use super::Tolerances;
use crate::error::{Error, Result};

/// Brent's bracketing root finder.
///
/// Stops when `|g(x)| <= tol.abs_tol` or when the bracket has shrunk to
/// `tol.rel_tol * |x|`. Every iterate stays inside a sign-changing bracket,
/// falling back to bisection whenever the interpolation step misbehaves.
pub fn find_root<F>(mut g: F, lo: f64, hi: f64, tol: Tolerances) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite()) || lo == hi {
        return Err(Error::InvalidInput(format!("bad bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (g(a)?, g(b)?);
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain("root function returned NaN at bracket end".into()));
    }
    if fa == 0.0 || fa.abs() <= tol.abs_tol && fa.abs() <= fb.abs() {
        return Ok(a);
    }
    if fb == 0.0 || fb.abs() <= tol.abs_tol {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { lo, hi, g_lo: fa, g_hi: fb });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    let mut evaluations = 2;
    loop {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let step_tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.rel_tol * b.abs();
        let m = 0.5 * (c - b);
        if m.abs() <= step_tol || fb == 0.0 || fb.abs() <= tol.abs_tol {
            return Ok(b);
        }
        if evaluations >= tol.max_evaluations {
            return Err(Error::NonConvergence {
                estimate: b.into(),
                abs_error: m.abs(),
                evaluations,
            });
        }

        if e.abs() >= step_tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (step_tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > step_tol { d } else { step_tol.copysign(m) };
        fb = g(b)?;
        evaluations += 1;
        if fb.is_nan() {
            return Err(Error::Domain(format!("root function returned NaN at {b}")));
        }
    }
}
