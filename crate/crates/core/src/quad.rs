//! Adaptive Simpson quadrature and analytic tails for integrands of the form
//! `Σ_ν a_ν e^{iνt} / ((t − a)(t − b))`.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// Richardson-style error estimate summed over accepted panels.
    pub error: f64,
}

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson on `[a, b]`, pre-split into `panels` equal pieces so that
/// oscillatory integrands are not accepted on a coarse first sample.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, panels: usize) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut exhausted = false;
    let panel_tol = tol / panels as f64;
    for k in 0..panels {
        let lo = a + width * k as f64;
        let hi = if k + 1 == panels { b } else { lo + width };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let whole = (flo + fmid * 4.0 + fhi) * ((hi - lo) / 6.0);
        let r = simpson_rec(&f, lo, hi, flo, fmid, fhi, whole, panel_tol, MAX_DEPTH, &mut exhausted);
        value += r.value;
        error += r.error;
    }
    if exhausted && error > tol {
        return Err(Error::QuadratureNonConvergence {
            achieved: error,
            requested: tol,
        });
    }
    Ok(QuadResult { value, error })
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
    exhausted: &mut bool,
) -> QuadResult
where
    F: Fn(f64) -> Complex64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
    let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol || depth == 0 {
        if depth == 0 {
            *exhausted = true;
        }
        return QuadResult {
            value: left + right + delta / 15.0,
            error: delta.norm() / 15.0,
        };
    }
    let l = simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, exhausted);
    let r = simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, exhausted);
    QuadResult {
        value: l.value + r.value,
        error: l.error + r.error,
    }
}

/// `∫_start^∞ e^{iνt} / ((t − a)(t − b)) dt` for `start > max(a, b)`.
///
/// For `ν = 0` the integral is closed form. Otherwise two integrations by
/// parts are taken explicitly and the remainder is bounded by `|K'(start)|/ν²`
/// (the kernel is positive, decreasing and convex on the tail).
pub fn right_tail(nu: f64, a: f64, b: f64, start: f64) -> (Complex64, f64) {
    debug_assert!(start > a.max(b));
    let (ua, ub) = (start - a, start - b);
    if nu == 0.0 {
        let v = if (a - b).abs() <= 1e-12 * (1.0 + ua.abs()) {
            1.0 / (0.5 * (ua + ub))
        } else {
            // antiderivative ln((t−a)/(t−b))/(a−b), vanishing at infinity
            ((a - b) / ua).ln_1p() / (a - b)
        };
        return (Complex64::new(v, 0.0), 0.0);
    }
    let k = 1.0 / (ua * ub);
    let dk = -(ua + ub) / (ua * ua * ub * ub);
    let phase = Complex64::from_polar(1.0, nu * start);
    let inu = Complex64::new(0.0, nu);
    let value = -phase * k / inu + phase * dk / (inu * inu);
    (value, dk.abs() / (nu * nu))
}

/// `∫_{−∞}^{end} e^{iνt} / ((t − a)(t − b)) dt` for `end < min(a, b)`.
pub fn left_tail(nu: f64, a: f64, b: f64, end: f64) -> (Complex64, f64) {
    // t = −u maps the left tail onto a right tail in u.
    right_tail(-nu, -a, -b, -end)
}
