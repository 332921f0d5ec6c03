//! Band-limited functions on the plane.
//!
//! A [`TrigPolynomial`] is a finite sum `Σ c_{jk} exp(i·h·(j·x + k·y))` with
//! frequencies on the lattice `h·ℤ²`. Everything here is exact coefficient
//! arithmetic except sup-norms, which are bracketed.

mod littlewood;
mod modulus;
mod slice;
mod supnorm;
mod window;

pub use littlewood::{
    besov_b1inf1_norm, jackson_check, lp_decomposition, lp_piece, lp_range, vp_smooth, JacksonRow,
};
pub use modulus::{omega_star, seminorm_estimate, ModulusKind, ModulusOfContinuity, OmegaStar};
pub use slice::TrigSlice;
pub use supnorm::{
    sup_norm, sup_norm_default, SupBracket, DEFAULT_REFINEMENT, MAX_REFINEMENT,
};
pub use window::CutoffWindow;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigPolynomialRepr", into = "TrigPolynomialRepr")]
pub struct TrigPolynomial {
    h: f64,
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

impl TrigPolynomial {
    /// Builds a polynomial from `((j, k), c)` terms. Repeated frequencies are
    /// summed and zero amplitudes dropped.
    pub fn new<I>(h: f64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((i64, i64), Complex64)>,
    {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid(format!("lattice step h must be positive, got {h}")));
        }
        let mut coeffs: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
        for (jk, c) in terms {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::invalid(format!("non-finite coefficient at {jk:?}")));
            }
            *coeffs.entry(jk).or_default() += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Self { h, coeffs })
    }

    pub fn zero(h: f64) -> Self {
        Self {
            h,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(h: f64, c: Complex64) -> Self {
        Self::new(h, [((0, 0), c)]).expect("valid constant")
    }

    /// `c · exp(i·h·(j·x + k·y))`
    pub fn exponential(h: f64, j: i64, k: i64, c: Complex64) -> Self {
        Self::new(h, [((j, k), c)]).expect("valid exponential")
    }

    /// Random polynomial with `terms` lattice frequencies drawn uniformly from
    /// the disc of radius `sigma` (zero frequency excluded) and complex
    /// Gaussian amplitudes scaled by `1/terms`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, h: f64, sigma: f64, terms: usize) -> Self {
        let kmax = (sigma / h).floor() as i64;
        let mut lattice = Vec::new();
        for j in -kmax..=kmax {
            for k in -kmax..=kmax {
                if (j, k) != (0, 0) && h * ((j * j + k * k) as f64).sqrt() <= sigma {
                    lattice.push((j, k));
                }
            }
        }
        if lattice.is_empty() || terms == 0 {
            return Self::zero(h);
        }
        let scale = 1.0 / terms as f64;
        let picks = (0..terms).map(|_| {
            let jk = lattice[rng.random_range(0..lattice.len())];
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            (jk, Complex64::new(re * scale, im * scale))
        });
        Self::new(h, picks.collect::<Vec<_>>()).expect("finite random coefficients")
    }

    /// Band-limited Hölder-α surrogate
    /// `Σ_{k<octaves} 2^{−kα}·(cos(2^k x) + sin(2^k y))/2` on the lattice `h = 1`.
    pub fn weierstrass(alpha: f64, octaves: u32) -> Self {
        let mut terms = Vec::new();
        for k in 0..octaves {
            let freq = 1i64 << k;
            let amp = 0.25 * 2f64.powf(-(k as f64) * alpha);
            terms.push(((freq, 0), Complex64::new(amp, 0.0)));
            terms.push(((-freq, 0), Complex64::new(amp, 0.0)));
            // sin(t)/2 = (e^{it} − e^{−it})/(4i)
            terms.push(((0, freq), Complex64::new(0.0, -amp)));
            terms.push(((0, -freq), Complex64::new(0.0, amp)));
        }
        Self::new(1.0, terms).expect("finite coefficients")
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn coeffs(&self) -> &BTreeMap<(i64, i64), Complex64> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Modulus `h·√(j²+k²)` of a lattice frequency.
    pub fn frequency_modulus(&self, j: i64, k: i64) -> f64 {
        self.h * ((j * j + k * k) as f64).sqrt()
    }

    /// Largest frequency modulus present (σ); zero for constants.
    pub fn support_radius(&self) -> f64 {
        self.coeffs
            .keys()
            .map(|&(j, k)| self.frequency_modulus(j, k))
            .fold(0.0, f64::max)
    }

    /// Largest lattice index `max(|j|, |k|)`.
    pub fn max_index(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|&(j, k)| j.abs().max(k.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Period `2π/h` in each variable.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.h
    }

    /// Zero-frequency coefficient.
    pub fn mean(&self) -> Complex64 {
        self.coeffs.get(&(0, 0)).copied().unwrap_or_default()
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&(j, k), &c)| c * Complex64::from_polar(1.0, self.h * (j as f64 * x + k as f64 * y)))
            .sum()
    }

    pub fn evaluate_at(&self, z: Complex64) -> Complex64 {
        self.evaluate(z.re, z.im)
    }

    pub fn partial_derivative(&self, axis: Axis) -> Self {
        let h = self.h;
        let terms = self.coeffs.iter().map(|(&(j, k), &c)| {
            let m = match axis {
                Axis::X => j,
                Axis::Y => k,
            };
            ((j, k), c * Complex64::new(0.0, h * m as f64))
        });
        Self::new(h, terms.collect::<Vec<_>>()).expect("finite")
    }

    /// Coefficientwise multiplication by `mult(|ξ|)`.
    pub fn radial_multiplier<F: Fn(f64) -> f64>(&self, mult: F) -> Self {
        let terms = self
            .coeffs
            .iter()
            .map(|(&(j, k), &c)| ((j, k), c * mult(self.frequency_modulus(j, k))));
        Self::new(self.h, terms.collect::<Vec<_>>()).expect("finite")
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let terms = self.coeffs.iter().map(|(&jk, &c)| (jk, c * s));
        Self::new(self.h, terms.collect::<Vec<_>>()).expect("finite")
    }

    fn check_lattice(&self, other: &Self) -> Result<()> {
        if self.h != other.h {
            return Err(Error::invalid(format!(
                "lattice steps differ: {} vs {}",
                self.h, other.h
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_lattice(other)?;
        let terms = self.coeffs.iter().chain(other.coeffs.iter()).map(|(&jk, &c)| (jk, c));
        Self::new(self.h, terms.collect::<Vec<_>>())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Sum of coefficient moduli, an elementary upper bound for `‖f‖∞`.
    pub fn l1_coefficients(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// One-variable slice `t ↦ f(t, y)` (axis x) or `t ↦ f(x, t)` (axis y),
    /// with `at` the frozen coordinate.
    pub fn slice(&self, axis: Axis, at: f64) -> TrigSlice {
        let mut terms: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (&(j, k), &c) in &self.coeffs {
            let (free, frozen) = match axis {
                Axis::X => (j, k),
                Axis::Y => (k, j),
            };
            let phase = Complex64::from_polar(1.0, self.h * frozen as f64 * at);
            *terms.entry(free).or_default() += c * phase;
        }
        TrigSlice::new(self.h, terms)
    }
}

#[derive(Serialize, Deserialize)]
struct TrigPolynomialRepr {
    h: f64,
    coeffs: Vec<CoeffRepr>,
}

#[derive(Serialize, Deserialize)]
struct CoeffRepr {
    j: i64,
    k: i64,
    re: f64,
    im: f64,
}

impl TryFrom<TrigPolynomialRepr> for TrigPolynomial {
    type Error = Error;

    fn try_from(r: TrigPolynomialRepr) -> Result<Self> {
        TrigPolynomial::new(
            r.h,
            r.coeffs
                .into_iter()
                .map(|c| ((c.j, c.k), Complex64::new(c.re, c.im)))
                .collect::<Vec<_>>(),
        )
    }
}

impl From<TrigPolynomial> for TrigPolynomialRepr {
    fn from(p: TrigPolynomial) -> Self {
        TrigPolynomialRepr {
            h: p.h,
            coeffs: p
                .coeffs
                .iter()
                .map(|(&(j, k), c)| CoeffRepr { j, k, re: c.re, im: c.im })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::trial_rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Neumaier-compensated summation of the terms, the extended-precision
    /// re-summation oracle for `evaluate`.
    fn compensated_eval(f: &TrigPolynomial, x: f64, y: f64) -> Complex64 {
        let mut sum = [0.0f64; 2];
        let mut comp = [0.0f64; 2];
        for (&(j, k), &cf) in f.coeffs() {
            let arg = f.h() * (j as f64 * x + k as f64 * y);
            let term = cf * c(arg.cos(), arg.sin());
            for (i, v) in [term.re, term.im].into_iter().enumerate() {
                let t = sum[i] + v;
                if sum[i].abs() >= v.abs() {
                    comp[i] += (sum[i] - t) + v;
                } else {
                    comp[i] += (v - t) + sum[i];
                }
                sum[i] = t;
            }
        }
        c(sum[0] + comp[0], sum[1] + comp[1])
    }

    #[test]
    fn evaluate_trivial_cases() {
        let one = TrigPolynomial::constant(1.0, c(1.0, 0.0));
        assert_eq!(one.evaluate(3.7, -2.0), c(1.0, 0.0));
        let e = TrigPolynomial::exponential(1.0, 1, 0, c(1.0, 0.0));
        assert!((e.evaluate(PI, 0.0) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_matches_compensated_sum() {
        let mut rng = trial_rng(1, 0);
        let f = TrigPolynomial::random(&mut rng, 0.5, 6.0, 20);
        assert!(f.len() >= 15);
        let direct = f.evaluate(0.3, 0.4);
        let oracle = compensated_eval(&f, 0.3, 0.4);
        assert!((direct - oracle).norm() <= 1e-13);
    }

    #[test]
    fn derivative_of_exponential_and_constant() {
        let one = TrigPolynomial::constant(1.0, c(1.0, 0.0));
        assert!(one.partial_derivative(Axis::X).is_zero());
        let e = TrigPolynomial::exponential(1.0, 1, 0, c(1.0, 0.0));
        let d = e.partial_derivative(Axis::X);
        assert_eq!(d, TrigPolynomial::exponential(1.0, 1, 0, c(0.0, 1.0)));
        assert!(e.partial_derivative(Axis::Y).is_zero());
    }

    #[test]
    fn support_radius_and_periodicity() {
        let mut rng = trial_rng(2, 0);
        let f = TrigPolynomial::random(&mut rng, 0.75, 5.0, 12);
        let sigma = f.support_radius();
        assert!(sigma <= 5.0 + 1e-12);
        let observed = f
            .coeffs()
            .keys()
            .map(|&(j, k)| f.frequency_modulus(j, k))
            .fold(0.0, f64::max);
        assert_eq!(sigma, observed);
        let p = f.period();
        for &(x, y) in &[(0.1, 0.2), (-1.3, 2.2)] {
            assert!((f.evaluate(x + p, y) - f.evaluate(x, y)).norm() < 1e-12);
            assert!((f.evaluate(x, y + p) - f.evaluate(x, y)).norm() < 1e-12);
        }
        assert!(f.coeffs().values().all(|c| c.norm() > 0.0));
    }

    #[test]
    fn slices_agree_with_evaluation() {
        let mut rng = trial_rng(3, 0);
        let f = TrigPolynomial::random(&mut rng, 1.0, 4.0, 10);
        let sx = f.slice(Axis::X, 0.7);
        let sy = f.slice(Axis::Y, -0.4);
        for t in [-2.0, 0.0, 1.5] {
            assert!((sx.evaluate(t) - f.evaluate(t, 0.7)).norm() < 1e-13);
            assert!((sy.evaluate(t) - f.evaluate(-0.4, t)).norm() < 1e-13);
        }
    }

    #[test]
    fn json_shape() {
        let f = TrigPolynomial::new(0.5, [((1, -2), c(1.5, -0.25))]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"h":0.5,"coeffs":[{"j":1,"k":-2,"re":1.5,"im":-0.25}]}"#);
        let back: TrigPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<TrigPolynomial>(r#"{"h":-1,"coeffs":[]}"#).is_err());
    }

    #[test]
    fn weierstrass_is_real_valued() {
        let f = TrigPolynomial::weierstrass(0.5, 4);
        assert_eq!(f.support_radius(), 8.0);
        for &(x, y) in &[(0.3, 1.1), (2.0, -0.5)] {
            assert!(f.evaluate(x, y).im.abs() < 1e-15);
        }
    }
}
