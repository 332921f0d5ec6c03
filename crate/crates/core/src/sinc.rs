//! Sinc-basis expansion of divided differences of band-limited functions and
//! the Haagerup factorization of divided-difference kernels built from it.
//!
//! For `f` of exponential type `σ`,
//!
//! ```text
//! (f(x) − f(y))/(x − y) = Σₙ (−1)ⁿ σ (f(x) − f(πn/σ))/(σx − πn) · sin(σy)/(σy − πn)
//! ```
//!
//! The basis `sin(σy)/(σy − πn)` has `Σₙ` of squares equal to one and the
//! coefficient row energy is at most `3‖f‖∞²`, which bounds the multiplier
//! norm of the kernel by `√3·σ·‖f‖∞`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bandlimited::{Axis, TrigPolynomial, TrigSlice};
use crate::doi::HaagerupFactors;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quad::{adaptive_simpson, left_tail, right_tail};

pub const DEFAULT_TRUNCATION: usize = 2000;
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
const MAX_WINDOW_DOUBLINGS: u32 = 24;

fn sinc(d: f64) -> f64 {
    if d.abs() < 1e-4 {
        let d2 = d * d;
        1.0 - d2 / 6.0 * (1.0 - d2 / 20.0)
    } else {
        d.sin() / d
    }
}

/// `sin(σy)/(σy − πn)`, equal to `(−1)ⁿ` at the removable singularity.
pub fn sinc_basis(sigma: f64, n: i64, y: f64) -> f64 {
    let d = sigma * y - PI * n as f64;
    if d.abs() < 1.0 {
        // sin(σy) = (−1)ⁿ sin(d)
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sign * sinc(d)
    } else {
        (sigma * y).sin() / d
    }
}

/// `Σ_{|n|≤N} sinc_basis(σ, n, y)²` and a bound on the omitted terms.
/// The full series sums to one.
pub fn basis_square_sum(sigma: f64, y: f64, truncation: usize) -> (f64, f64) {
    let n_max = truncation as i64;
    let sum = (-n_max..=n_max).map(|n| sinc_basis(sigma, n, y).powi(2)).sum();
    let c = (sigma * y).abs();
    let gap = PI * truncation as f64 - c;
    let tail = if gap > 0.0 { 2.0 / (PI * gap) } else { f64::INFINITY };
    (sum, tail)
}

/// Certified upper bound of `‖g‖∞` for a one-variable slice, from a grid
/// fine enough that the bracket is within 0.1 %.
fn slice_sup_upper(g: &TrigSlice) -> f64 {
    let ratio_target = 1e-3;
    let k = g.support_radius() / g.h();
    let needed = (PI * k / ratio_target).ceil().max(64.0) as usize;
    g.sup_norm(needed.next_power_of_two())
        .map(|b| b.upper)
        .unwrap_or_else(|_| g.coeffs().values().map(|c| c.norm()).sum())
}

/// Trigonometric numerator `Σ b_ν e^{iνt}` with coinciding frequencies merged.
#[derive(Default)]
struct Numerator {
    terms: Vec<(f64, Complex64)>,
}

impl Numerator {
    fn push(&mut self, nu: f64, b: Complex64) {
        let nu = if nu.abs() < 1e-12 { 0.0 } else { nu };
        if let Some(t) = self.terms.iter_mut().find(|t| (t.0 - nu).abs() <= 1e-12 * (1.0 + nu.abs())) {
            t.1 += b;
        } else {
            self.terms.push((nu, b));
        }
    }

    fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|t| t.0.abs()).fold(0.0, f64::max)
    }
}

/// `f(x) − f(t)` as a trigonometric polynomial in `t`.
fn difference_numerator(g: &TrigSlice, x: f64) -> Numerator {
    let mut p = Numerator::default();
    p.push(0.0, g.evaluate(x));
    for (&j, &a) in g.coeffs() {
        p.push(g.h() * j as f64, -a);
    }
    p
}

/// `∫_ℝ body(t) dt` where outside the window `body` equals
/// `Σ b_ν e^{iνt} / ((t − a)(t − b))`. The window `[c − W, c + W]` starts at
/// `W = 50π/σ` beyond the singular centres and doubles until the analytic
/// tail error is below half of `tol`.
fn rational_oscillatory_integral<F>(body: F, numerator: &Numerator, a: f64, b: f64, sigma: f64, tol: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let centre = 0.5 * (a + b);
    let half_gap = 0.5 * (a - b).abs();
    let mut width = 50.0 * PI / sigma;
    for _ in 0..MAX_WINDOW_DOUBLINGS {
        let (lo, hi) = (centre - half_gap - width, centre + half_gap + width);
        let mut tail = Complex64::new(0.0, 0.0);
        let mut tail_err = 0.0;
        for &(nu, coef) in &numerator.terms {
            let (rv, re) = right_tail(nu, a, b, hi);
            let (lv, le) = left_tail(nu, a, b, lo);
            tail += coef * (rv + lv);
            tail_err += coef.norm() * (re + le);
        }
        if tail_err <= 0.5 * tol {
            let nu_max = numerator.max_frequency().max(sigma);
            let panels = ((hi - lo) * nu_max / (0.5 * PI)).ceil().max(16.0) as usize;
            let q = adaptive_simpson(&body, lo, hi, 0.5 * tol, panels)?;
            return Ok((q.value + tail, q.error + tail_err));
        }
        width *= 2.0;
    }
    Err(Error::QuadratureNonConvergence { achieved: f64::INFINITY, requested: tol })
}

/// `(1/(πσ)) ∫ sin²(σ(y − t))/(y − t)² dt`, which equals one.
pub fn normalization_integral(sigma: f64, y: f64, tol: f64) -> Result<(f64, f64)> {
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma must be positive"));
    }
    // sin²(σ(y−t)) = 1/2 − (e^{2iσy}e^{−2iσt} + e^{−2iσy}e^{2iσt})/4
    let mut p = Numerator::default();
    p.push(0.0, Complex64::new(0.5, 0.0));
    p.push(-2.0 * sigma, -Complex64::from_polar(0.25, 2.0 * sigma * y));
    p.push(2.0 * sigma, -Complex64::from_polar(0.25, -2.0 * sigma * y));
    let scale = 1.0 / (PI * sigma);
    let body = |t: f64| Complex64::new(sigma * sigma * sinc(sigma * (y - t)).powi(2), 0.0);
    let (v, e) = rational_oscillatory_integral(body, &p, y, y, sigma, tol / scale)?;
    Ok((v.re * scale, e * scale))
}

/// `(1/π) ∫ min(4, u²)/u² du = 8/π`: Simpson on `[−W, W]` plus the exact
/// tail `8/W`.
pub fn proof_envelope_integral(tol: f64) -> Result<f64> {
    let w = 64.0;
    let integrand = |u: f64| Complex64::new(if u.abs() <= 2.0 { 1.0 } else { 4.0 / (u * u) }, 0.0);
    let mut total = 0.0;
    for (lo, hi) in [(-w, -2.0), (-2.0, 2.0), (2.0, w)] {
        total += adaptive_simpson(integrand, lo, hi, tol / 3.0, 8)?.value.re;
    }
    Ok((total + 8.0 / w) / PI)
}

/// Value with a certified bound on the truncation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncated {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Partial sums and integral forms of the row energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowEnergy {
    /// `Σ_{|n|≤N} |f(x) − f(πn/σ)|²/(σx − πn)²`
    pub sum: f64,
    /// `(1/(πσ)) ∫ |f(x) − f(t)|²/(x − t)² dt`
    pub integral: f64,
    pub integral_error: f64,
}

/// Sinc expansion of the divided differences of a one-variable slice of
/// type at most `sigma`, truncated to `|n| ≤ truncation`.
#[derive(Clone, Debug, PartialEq)]
pub struct SincExpansion {
    sigma: f64,
    truncation: usize,
    slice: TrigSlice,
    sup_upper: f64,
}

impl SincExpansion {
    pub fn new(slice: TrigSlice, sigma: f64, truncation: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        if truncation < 1 {
            return Err(Error::invalid("truncation must be at least 1"));
        }
        let support = slice.support_radius();
        if support > sigma * (1.0 + 1e-12) {
            return Err(Error::BandLimitExceeded { support, sigma });
        }
        let sup_upper = slice_sup_upper(&slice);
        Ok(Self { sigma, truncation, slice, sup_upper })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn slice(&self) -> &TrigSlice {
        &self.slice
    }

    /// Certified upper bound of `‖f‖∞` used by the tail certificates.
    pub fn sup_upper(&self) -> f64 {
        self.sup_upper
    }

    fn node(&self, n: i64) -> f64 {
        PI * n as f64 / self.sigma
    }

    /// `(−1)ⁿ σ (f(x) − f(πn/σ))/(σx − πn)`, which is `(−1)ⁿ` times the
    /// divided difference of `f` at `x` and the node `πn/σ`.
    pub fn coefficient(&self, n: i64, x: f64) -> Complex64 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        self.slice.divided_difference(x, self.node(n)) * sign
    }

    fn indices(&self) -> std::ops::RangeInclusive<i64> {
        let n = self.truncation as i64;
        -n..=n
    }

    /// `4‖f‖∞σ / (π(πN − c))` with `c = max(|σx|, |σy|)`: the sum over
    /// `|n| > N` of `|coefficient|·|basis|`, each at most
    /// `2‖f‖∞σ/(πn − c)²`.
    pub fn tail_bound(&self, x: f64, y: f64) -> f64 {
        let c = (self.sigma * x).abs().max((self.sigma * y).abs());
        let gap = PI * self.truncation as f64 - c;
        if gap <= 0.0 {
            return f64::INFINITY;
        }
        4.0 * self.sup_upper * self.sigma / (PI * gap)
    }

    /// Partial sum of the expansion of `(f(x) − f(y))/(x − y)`.
    pub fn reconstruct_dd(&self, x: f64, y: f64) -> Truncated {
        let value = self
            .indices()
            .map(|n| self.coefficient(n, x) * sinc_basis(self.sigma, n, y))
            .sum();
        Truncated { value, tail_bound: self.tail_bound(x, y) }
    }

    pub fn row_energy(&self, x: f64, quad_tol: f64) -> Result<RowEnergy> {
        let sum = self
            .indices()
            .map(|n| self.coefficient(n, x).norm_sqr())
            .sum::<f64>()
            / (self.sigma * self.sigma);
        let p = difference_numerator(&self.slice, x);
        let mut sq = Numerator::default();
        for &(nu1, b1) in &p.terms {
            for &(nu2, b2) in &p.terms {
                sq.push(nu1 - nu2, b1 * b2.conj());
            }
        }
        let scale = 1.0 / (PI * self.sigma);
        let body = |t: f64| Complex64::new(self.slice.divided_difference(x, t).norm_sqr(), 0.0);
        let (v, e) = rational_oscillatory_integral(body, &sq, x, x, self.sigma, quad_tol / scale)?;
        Ok(RowEnergy { sum, integral: v.re * scale, integral_error: e * scale })
    }

    /// `(1/π) ∫ (f(x) − f(t))/(x − t) · sin(σ(y − t))/(y − t) dt`, which
    /// reproduces `(f(x) − f(y))/(x − y)`. Returns the value and the
    /// combined quadrature and truncation error.
    pub fn reproducing_integral(&self, x: f64, y: f64, quad_tol: f64) -> Result<(Complex64, f64)> {
        let s = self.sigma;
        let p = difference_numerator(&self.slice, x);
        // sin(σ(y−t)) = (e^{iσy}e^{−iσt} − e^{−iσy}e^{iσt})/(2i)
        let two_i = Complex64::new(0.0, 2.0);
        let mut num = Numerator::default();
        for &(nu, b) in &p.terms {
            num.push(nu - s, b * Complex64::from_polar(1.0, s * y) / two_i);
            num.push(nu + s, -b * Complex64::from_polar(1.0, -s * y) / two_i);
        }
        let body = |t: f64| self.slice.divided_difference(x, t) * (s * sinc(s * (y - t)));
        // Outside the window the integrand is num(t)/((t − x)(t − y)).
        let (v, e) = rational_oscillatory_integral(body, &num, x, y, s, quad_tol * PI)?;
        Ok((v / PI, e / PI))
    }
}

/// Haagerup factorization of a divided-difference kernel from sinc
/// expansions, with its certificates.
#[derive(Clone, Debug, PartialEq)]
pub struct SincFactorization {
    pub factors: HaagerupFactors,
    /// Bound on `|Φⱼₖ − Σₙ AⱼₙBₖₙ|` for every entry.
    pub tail_bound: f64,
    pub sigma: f64,
    /// Largest certified slice sup-norm used.
    pub sup_upper: f64,
    /// `√(maxⱼ Σₙ|Aⱼₙ|²)·√(maxₖ Σₙ|Bₖₙ|²)`
    pub upper: f64,
}

/// Factorization `Φⱼₖ ≈ Σ_{|n|≤N} Aⱼₙ·Bₖₙ` of the divided-difference kernel
/// of `f` along `axis` on `(λ, μ)`.
///
/// * x: `Aⱼₙ = sinc_basis(σ, n, Re λⱼ)`, `Bₖₙ` the coefficients of the
///   slice `t ↦ f(t, Im μₖ)` at `Re μₖ`.
/// * y: `Aⱼₙ` the coefficients of `t ↦ f(Re λⱼ, t)` at `Im λⱼ`,
///   `Bₖₙ = sinc_basis(σ, n, Im μₖ)`.
///
/// The basis side has row energy at most one and the coefficient side at
/// most `√3·σ·‖f‖∞`.
pub fn haagerup_factorization(
    f: &TrigPolynomial,
    axis: Axis,
    rows: &[Complex64],
    cols: &[Complex64],
    sigma: f64,
    truncation: usize,
) -> Result<SincFactorization> {
    let support = f.support_radius();
    if support > sigma * (1.0 + 1e-12) {
        return Err(Error::BandLimitExceeded { support, sigma });
    }
    let width = 2 * truncation + 1;
    let offset = truncation as i64;
    let mut tail_bound: f64 = 0.0;
    let mut sup_upper: f64 = 0.0;
    let mut coefficient_rows = |points: &[Complex64], slice_axis: Axis| -> Result<CMatrix> {
        let mut m = CMatrix::zeros(points.len(), width);
        for (r, z) in points.iter().enumerate() {
            let (frozen, at) = match slice_axis {
                Axis::X => (z.im, z.re),
                Axis::Y => (z.re, z.im),
            };
            let exp = SincExpansion::new(f.slice(slice_axis, frozen), sigma, truncation)?;
            sup_upper = sup_upper.max(exp.sup_upper());
            for i in 0..width {
                m[(r, i)] = exp.coefficient(i as i64 - offset, at);
            }
            let other = match axis {
                Axis::X => rows.iter().map(|l| l.re.abs()).fold(0.0, f64::max),
                Axis::Y => cols.iter().map(|l| l.im.abs()).fold(0.0, f64::max),
            };
            tail_bound = tail_bound.max(exp.tail_bound(at, other));
        }
        Ok(m)
    };
    let (a, b) = match axis {
        Axis::X => {
            let b = coefficient_rows(cols, Axis::X)?;
            let a = CMatrix::from_fn(rows.len(), width, |j, i| Complex64::new(sinc_basis(sigma, i as i64 - offset, rows[j].re), 0.0));
            (a, b)
        }
        Axis::Y => {
            let a = coefficient_rows(rows, Axis::Y)?;
            let b = CMatrix::from_fn(cols.len(), width, |k, i| Complex64::new(sinc_basis(sigma, i as i64 - offset, cols[k].im), 0.0));
            (a, b)
        }
    };
    let factors = HaagerupFactors::new(a, b).with_tolerance(tail_bound + 1e-10);
    let upper = factors.row_energy_product();
    Ok(SincFactorization { factors, tail_bound, sigma, sup_upper, upper })
}
