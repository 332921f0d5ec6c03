use serde::{Deserialize, Serialize};

use super::{seminorm_estimate, sup_norm_default, CutoffWindow, ModulusOfContinuity, TrigPolynomial};
use crate::error::Result;

/// `fₙ = f * Wₙ`: coefficients scaled by `w(|ξ|/2ⁿ)`.
pub fn lp_piece(f: &TrigPolynomial, n: i32, win: &CutoffWindow) -> TrigPolynomial {
    let scale = 2f64.powi(n);
    f.radial_multiplier(|r| win.w(r / scale))
}

/// `f * Vₙ`: coefficients scaled by `v(|ξ|/2ⁿ)`.
pub fn vp_smooth(f: &TrigPolynomial, n: i32, win: &CutoffWindow) -> TrigPolynomial {
    let scale = 2f64.powi(n);
    f.radial_multiplier(|r| win.v(r / scale))
}

/// Inclusive range of `n` that can carry a nonzero piece, or `None` when
/// `f` has no nonzero frequency.
pub fn lp_range(f: &TrigPolynomial) -> Option<(i32, i32)> {
    let radii = f
        .coeffs()
        .keys()
        .map(|&(j, k)| f.frequency_modulus(j, k))
        .filter(|&r| r > 0.0);
    let (lo, hi) = radii.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    if !lo.is_finite() {
        return None;
    }
    Some((lo.log2().floor() as i32 - 1, hi.log2().ceil() as i32 + 1))
}

/// All nonzero pieces `(n, fₙ)` in increasing `n`.
pub fn lp_decomposition(f: &TrigPolynomial, win: &CutoffWindow) -> Vec<(i32, TrigPolynomial)> {
    let Some((lo, hi)) = lp_range(f) else {
        return Vec::new();
    };
    (lo..=hi)
        .map(|n| (n, lp_piece(f, n, win)))
        .filter(|(_, p)| !p.is_zero())
        .collect()
}

/// `Σₙ 2ⁿ‖fₙ‖∞` using certified upper brackets.
pub fn besov_b1inf1_norm(f: &TrigPolynomial, win: &CutoffWindow) -> Result<f64> {
    let mut total = 0.0;
    for (n, piece) in lp_decomposition(f, win) {
        total += 2f64.powi(n) * sup_norm_default(&piece)?.upper;
    }
    Ok(total)
}

/// One row of [`jackson_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacksonRow {
    pub n: i32,
    /// Upper bracket of `‖f − f*Vₙ‖∞`.
    pub vp_residual: f64,
    /// `vp_residual / (ω(2⁻ⁿ)·seminorm)`.
    pub vp_ratio: f64,
    /// Upper bracket of `‖f*Wₙ‖∞`.
    pub piece_norm: f64,
    pub piece_ratio: f64,
}

/// Empirical Jackson constants over `n_range`. The seminorm is the sampled
/// lower estimate, so the ratios over-estimate the true constants.
pub fn jackson_check(
    f: &TrigPolynomial,
    omega: &ModulusOfContinuity,
    n_range: std::ops::RangeInclusive<i32>,
    win: &CutoffWindow,
    samples: usize,
    seed: u64,
) -> Result<Vec<JacksonRow>> {
    let semi = seminorm_estimate(f, omega, samples, seed);
    let ratio = |value: f64, n: i32| {
        let denom = omega.eval(2f64.powi(-n)) * semi;
        if value == 0.0 {
            0.0
        } else {
            value / denom
        }
    };
    n_range
        .map(|n| {
            let residual = f.sub(&vp_smooth(f, n, win))?;
            let vp_residual = sup_norm_default(&residual)?.upper;
            let piece_norm = sup_norm_default(&lp_piece(f, n, win))?.upper;
            Ok(JacksonRow {
                n,
                vp_residual,
                vp_ratio: ratio(vp_residual, n),
                piece_norm,
                piece_ratio: ratio(piece_norm, n),
            })
        })
        .collect()
}
