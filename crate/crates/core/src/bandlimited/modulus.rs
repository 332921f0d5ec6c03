use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::TrigPolynomial;
use crate::error::{Error, Result};
use crate::exec::trial_rng;
use crate::quad::adaptive_simpson;

#[derive(Clone)]
pub enum ModulusKind {
    /// `ω(t) = t^α`
    Power(f64),
    /// `ω(t) = min(t, d)`
    CappedLinear(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ModulusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModulusKind::Power(a) => write!(f, "Power({a})"),
            ModulusKind::CappedLinear(d) => write!(f, "CappedLinear({d})"),
            ModulusKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ModulusOfContinuity {
    kind: ModulusKind,
}

impl ModulusOfContinuity {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("power modulus needs 0 < α ≤ 1, got {alpha}")));
        }
        Ok(Self { kind: ModulusKind::Power(alpha) })
    }

    pub fn capped_linear(d: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::invalid(format!("cap must be positive, got {d}")));
        }
        Ok(Self { kind: ModulusKind::CappedLinear(d) })
    }

    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(omega: F) -> Self {
        Self { kind: ModulusKind::Custom(Arc::new(omega)) }
    }

    pub fn kind(&self) -> &ModulusKind {
        &self.kind
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            ModulusKind::Power(a) => t.powf(*a),
            ModulusKind::CappedLinear(d) => t.min(*d),
            ModulusKind::Custom(w) => w(t),
        }
    }

    /// Worst violation of `ω(0) = 0`, monotonicity and subadditivity over a
    /// log-spaced sample of `[1e−3, 1e3]`.
    pub fn axiom_defect(&self, samples: usize) -> f64 {
        let n = samples.max(2);
        let pts: Vec<f64> = (0..n)
            .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (n - 1) as f64))
            .collect();
        let mut worst = self.eval(0.0).abs();
        for w in pts.windows(2) {
            worst = worst.max(self.eval(w[0]) - self.eval(w[1]));
        }
        for &x in &pts {
            for &y in pts.iter().step_by((n / 16).max(1)) {
                worst = worst.max(self.eval(x + y) - self.eval(x) - self.eval(y));
            }
        }
        worst.max(0.0)
    }
}

/// Value of `ω★(x) = x ∫ₓ^∞ ω(t)/t² dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaStar {
    pub value: f64,
    /// Zero for closed forms. For custom moduli, a heuristic estimate of the
    /// truncated tail: the integrand at the cutoff.
    pub tail_estimate: f64,
}

const OMEGA_STAR_QUAD_TOL: f64 = 1e-10;
const OMEGA_STAR_TRUNCATION: f64 = 1e-12;
const OMEGA_STAR_MAX_LOG_SPAN: f64 = 700.0;

pub fn omega_star(omega: &ModulusOfContinuity, x: f64) -> Result<OmegaStar> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!("omega_star needs x > 0, got {x}")));
    }
    match omega.kind() {
        ModulusKind::Power(a) => {
            if *a >= 1.0 {
                return Err(Error::OmegaStarUndefined(format!("power modulus with α = {a}")));
            }
            Ok(OmegaStar { value: x.powf(*a) / (1.0 - a), tail_estimate: 0.0 })
        }
        ModulusKind::CappedLinear(d) => {
            let value = if x <= *d { x * ((d / x).ln() + 1.0) } else { *d };
            Ok(OmegaStar { value, tail_estimate: 0.0 })
        }
        ModulusKind::Custom(_) => omega_star_quadrature(omega, x),
    }
}

/// Quadrature in `s = ln(t/x)`, where the integral becomes
/// `∫₀^∞ ω(x·eˢ)·e⁻ˢ ds`, integrated one unit of `s` at a time until the
/// integrand falls below `1e−12` of the running value.
pub(crate) fn omega_star_quadrature(omega: &ModulusOfContinuity, x: f64) -> Result<OmegaStar> {
    let integrand = |s: f64| omega.eval(x * s.exp()) * (-s).exp();
    let mut total = 0.0;
    let mut s = 0.0;
    while s < OMEGA_STAR_MAX_LOG_SPAN {
        let r = adaptive_simpson(|t| Complex64::new(integrand(t), 0.0), s, s + 1.0, OMEGA_STAR_QUAD_TOL, 4)?;
        total += r.value.re;
        s += 1.0;
        let edge = integrand(s);
        if !edge.is_finite() {
            break;
        }
        if edge < OMEGA_STAR_TRUNCATION * total {
            return Ok(OmegaStar { value: total, tail_estimate: edge });
        }
    }
    Err(Error::OmegaStarUndefined(format!(
        "tail of ω(t)/t² not negligible by t = x·e^{s}"
    )))
}

/// Sampled lower estimate of `sup |f(z₁) − f(z₂)| / ω(|z₁ − z₂|)`.
///
/// Pairs: every horizontally or vertically adjacent pair of the 64×64
/// periodic grid, then `samples` seeded random pairs with log-uniform
/// separation in `[10⁻³·P, P]` (P the period) and uniform direction. The
/// result is a running maximum, so it is monotone in `samples`.
pub fn seminorm_estimate(f: &TrigPolynomial, omega: &ModulusOfContinuity, samples: usize, seed: u64) -> f64 {
    if f.coeffs().keys().all(|&jk| jk == (0, 0)) {
        return 0.0;
    }
    let p = f.period();
    let quotient = |x1: f64, y1: f64, x2: f64, y2: f64| {
        let dist = (x1 - x2).hypot(y1 - y2);
        let w = omega.eval(dist);
        if w > 0.0 {
            (f.evaluate(x1, y1) - f.evaluate(x2, y2)).norm() / w
        } else {
            0.0
        }
    };

    const GRID: usize = 64;
    let step = p / GRID as f64;
    let values: Vec<Complex64> = (0..GRID * GRID)
        .map(|i| f.evaluate((i / GRID) as f64 * step, (i % GRID) as f64 * step))
        .collect();
    let w_step = omega.eval(step);
    let mut best: f64 = 0.0;
    for a in 0..GRID {
        for b in 0..GRID {
            let here = values[a * GRID + b];
            let right = values[((a + 1) % GRID) * GRID + b];
            let up = values[a * GRID + (b + 1) % GRID];
            best = best.max((here - right).norm() / w_step);
            best = best.max((here - up).norm() / w_step);
        }
    }

    let mut rng = trial_rng(seed, 0);
    let (lo, hi) = ((1e-3 * p).ln(), p.ln());
    for _ in 0..samples {
        let x1 = rng.random::<f64>() * p;
        let y1 = rng.random::<f64>() * p;
        let r = rng.random_range(lo..hi).exp();
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        best = best.max(quotient(x1, y1, x1 + r * theta.cos(), y1 + r * theta.sin()));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_forms() {
        let w = ModulusOfContinuity::power(0.5).unwrap();
        assert!((omega_star(&w, 4.0).unwrap().value - 4.0).abs() < 1e-15);
        let capped = ModulusOfContinuity::capped_linear(2.0).unwrap();
        let d = 0.25;
        let v = omega_star(&capped, d).unwrap().value;
        assert!((v - (d * (2.0f64 / d).ln() + d)).abs() < 1e-15);
        assert_eq!(omega_star(&capped, 2.0).unwrap().value, 2.0);
        let lin = ModulusOfContinuity::power(1.0).unwrap();
        assert!(matches!(omega_star(&lin, 1.0), Err(Error::OmegaStarUndefined(_))));
    }

    #[test]
    fn custom_quadrature_matches_closed_forms() {
        for alpha in [0.25, 0.5, 0.75] {
            let custom = ModulusOfContinuity::custom(move |t| t.powf(alpha));
            let closed = ModulusOfContinuity::power(alpha).unwrap();
            for x in [1e-3, 0.3, 2.0] {
                let q = omega_star(&custom, x).unwrap().value;
                let e = omega_star(&closed, x).unwrap().value;
                assert!((q - e).abs() <= 1e-8 * e.max(1.0), "α={alpha} x={x}: {q} vs {e}");
            }
        }
        let custom = ModulusOfContinuity::custom(|t| t.min(1.5));
        let closed = ModulusOfContinuity::capped_linear(1.5).unwrap();
        for x in [1e-4, 0.1, 1.0, 1.5, 3.0] {
            let q = omega_star(&custom, x).unwrap().value;
            let e = omega_star(&closed, x).unwrap().value;
            assert!((q - e).abs() <= 1e-8 * e.max(1.0), "x={x}: {q} vs {e}");
        }
        let lin = ModulusOfContinuity::custom(|t| t);
        assert!(matches!(omega_star(&lin, 1.0), Err(Error::OmegaStarUndefined(_))));
    }

    #[test]
    fn omega_star_dominates_half_omega() {
        let kinds = [
            ModulusOfContinuity::power(0.3).unwrap(),
            ModulusOfContinuity::capped_linear(0.7).unwrap(),
            ModulusOfContinuity::custom(|t| (1.0 + t).ln()),
        ];
        for w in &kinds {
            assert!(w.axiom_defect(64) <= 1e-12);
            for x in [0.01, 0.5, 5.0] {
                if let Ok(s) = omega_star(w, x) {
                    assert!(s.value >= 0.5 * w.eval(x));
                }
            }
        }
    }

    #[test]
    fn seminorm_of_exponential() {
        let one = TrigPolynomial::constant(1.0, c(1.0, 0.0));
        let lip = ModulusOfContinuity::power(1.0).unwrap();
        assert_eq!(seminorm_estimate(&one, &lip, 100, 0), 0.0);
        let e = TrigPolynomial::exponential(1.0, 1, 0, c(1.0, 0.0));
        let est = seminorm_estimate(&e, &lip, 10_000, 9);
        assert!((0.99..=1.0).contains(&est), "{est}");
        let a = seminorm_estimate(&e, &lip, 10, 9);
        let b = seminorm_estimate(&e, &lip, 500, 9);
        assert!(a <= b && b <= est);
    }
}
