use std::collections::BTreeMap;

use num_complex::Complex64;

use super::SupBracket;
use crate::error::{Error, Result};

/// One-variable trigonometric polynomial `t ↦ Σ a_j exp(i·h·j·t)`, e.g. a
/// slice of a [`super::TrigPolynomial`] with one coordinate frozen.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigSlice {
    h: f64,
    coeffs: BTreeMap<i64, Complex64>,
}

impl TrigSlice {
    pub fn new(h: f64, mut coeffs: BTreeMap<i64, Complex64>) -> Self {
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { h, coeffs }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Complex64)>>(h: f64, terms: I) -> Self {
        let mut coeffs: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (j, c) in terms {
            *coeffs.entry(j).or_default() += c;
        }
        Self::new(h, coeffs)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    pub fn support_radius(&self) -> f64 {
        self.coeffs
            .keys()
            .map(|&j| self.h * j.abs() as f64)
            .fold(0.0, f64::max)
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&j, &c)| c * Complex64::from_polar(1.0, self.h * j as f64 * t))
            .sum()
    }

    pub fn derivative(&self, t: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&j, &c)| {
                c * Complex64::new(0.0, self.h * j as f64) * Complex64::from_polar(1.0, self.h * j as f64 * t)
            })
            .sum()
    }

    /// `(f(x) − f(t))/(x − t)`, switching to `f′` at the midpoint when the
    /// points nearly coincide.
    pub fn divided_difference(&self, x: f64, t: f64) -> Complex64 {
        if (x - t).abs() <= 1e-7 * (1.0 + x.abs().max(t.abs())) {
            self.derivative(0.5 * (x + t))
        } else {
            (self.evaluate(x) - self.evaluate(t)) / (x - t)
        }
    }

    /// Grid bracket over one period with `m` points; the Bernstein bound
    /// `‖f′‖∞ ≤ σ‖f‖∞` controls the gap to the nearest node (`δ/2`).
    pub fn sup_norm(&self, m: usize) -> Result<SupBracket> {
        let sigma = self.support_radius();
        if self.coeffs.is_empty() {
            return Ok(SupBracket { lower: 0.0, upper: 0.0, refinement: m });
        }
        let spacing = std::f64::consts::TAU / self.h / m as f64;
        let ratio = sigma * spacing / 2.0;
        if ratio >= 1.0 {
            return Err(Error::RefinementTooCoarse {
                refinement: m,
                sigma,
                ratio,
            });
        }
        let lower = (0..m)
            .map(|i| self.evaluate(i as f64 * spacing).norm())
            .fold(0.0, f64::max);
        Ok(SupBracket {
            lower,
            upper: lower / (1.0 - ratio),
            refinement: m,
        })
    }
}
