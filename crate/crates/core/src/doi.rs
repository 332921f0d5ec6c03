//! Double operator integrals over finite spectral measures.
//!
//! With `N₁ = U₁·diag(λ)·U₁*` and `N₂ = U₂·diag(μ)·U₂*`, the integral
//! `∬ Φ(z₁, z₂) dE₁(z₁) T dE₂(z₂)` is the Hadamard product of the sampled
//! kernel `Φ(λⱼ, μₖ)` with `U₁*·T·U₂`, conjugated back.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bandlimited::{Axis, TrigPolynomial};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, trial_rng, Execution};
use crate::linalg::{complex_gaussian, operator_norm, CMatrix};
use crate::spectral::SpectralDecomposition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelProvenance {
    Dx,
    Dy,
    Custom,
}

/// `Φ(λⱼ, μₖ)` sampled on two spectra.
#[derive(Clone, Debug, PartialEq)]
pub struct DoiKernel {
    rows: Vec<Complex64>,
    cols: Vec<Complex64>,
    values: CMatrix,
    provenance: KernelProvenance,
}

impl DoiKernel {
    pub fn from_fn<F: Fn(Complex64, Complex64) -> Complex64>(rows: &[Complex64], cols: &[Complex64], phi: F) -> Self {
        let values = CMatrix::from_fn(rows.len(), cols.len(), |j, k| phi(rows[j], cols[k]));
        Self {
            rows: rows.to_vec(),
            cols: cols.to_vec(),
            values,
            provenance: KernelProvenance::Custom,
        }
    }

    pub fn new(rows: Vec<Complex64>, cols: Vec<Complex64>, values: CMatrix) -> Result<Self> {
        if values.shape() != (rows.len(), cols.len()) {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", rows.len(), cols.len()),
                found: format!("{:?}", values.shape()),
            });
        }
        Ok(Self { rows, cols, values, provenance: KernelProvenance::Custom })
    }

    pub fn rows(&self) -> &[Complex64] {
        &self.rows
    }

    pub fn cols(&self) -> &[Complex64] {
        &self.cols
    }

    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    pub fn provenance(&self) -> KernelProvenance {
        self.provenance
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entries as CSV with header `j,k,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,k,re,im\n");
        for j in 0..self.values.nrows() {
            for k in 0..self.values.ncols() {
                let z = self.values[(j, k)];
                let _ = writeln!(out, "{j},{k},{:?},{:?}", z.re, z.im);
            }
        }
        out
    }
}

/// `1e−7·(1 + spread)` of the coordinate selected by `axis` over both spectra.
pub fn default_eps_dd(axis: Axis, rows: &[Complex64], cols: &[Complex64]) -> f64 {
    let coord = |z: &Complex64| match axis {
        Axis::X => z.re,
        Axis::Y => z.im,
    };
    let (lo, hi) = rows
        .iter()
        .chain(cols)
        .map(coord)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let spread = if lo.is_finite() { hi - lo } else { 0.0 };
    1e-7 * (1.0 + spread)
}

/// Divided-difference kernel of `f` along `axis`:
///
/// * x: `(f(x₁, y₂) − f(x₂, y₂)) / (x₁ − x₂)`
/// * y: `(f(x₁, y₁) − f(x₁, y₂)) / (y₁ − y₂)`
///
/// with `z₁ = λⱼ`, `z₂ = μₖ`. When the coordinate gap is at most `eps_dd`
/// the entry is the partial derivative at the midpoint.
pub fn divided_difference_kernel(
    f: &TrigPolynomial,
    axis: Axis,
    rows: &[Complex64],
    cols: &[Complex64],
    eps_dd: f64,
) -> Result<DoiKernel> {
    if !(eps_dd > 0.0) {
        return Err(Error::invalid(format!("eps_dd must be positive, got {eps_dd}")));
    }
    let deriv = f.partial_derivative(axis);
    let values = CMatrix::from_fn(rows.len(), cols.len(), |j, k| {
        let (x1, y1) = (rows[j].re, rows[j].im);
        let (x2, y2) = (cols[k].re, cols[k].im);
        match axis {
            Axis::X => {
                if (x1 - x2).abs() <= eps_dd {
                    deriv.evaluate(0.5 * (x1 + x2), y2)
                } else {
                    (f.evaluate(x1, y2) - f.evaluate(x2, y2)) / (x1 - x2)
                }
            }
            Axis::Y => {
                if (y1 - y2).abs() <= eps_dd {
                    deriv.evaluate(x1, 0.5 * (y1 + y2))
                } else {
                    (f.evaluate(x1, y1) - f.evaluate(x1, y2)) / (y1 - y2)
                }
            }
        }
    });
    Ok(DoiKernel {
        rows: rows.to_vec(),
        cols: cols.to_vec(),
        values,
        provenance: match axis {
            Axis::X => KernelProvenance::Dx,
            Axis::Y => KernelProvenance::Dy,
        },
    })
}

fn check_kernel(phi: &DoiKernel, d1: &SpectralDecomposition, d2: &SpectralDecomposition) -> Result<()> {
    if phi.rows.as_slice() != d1.eigenvalues() || phi.cols.as_slice() != d2.eigenvalues() {
        return Err(Error::KernelMismatch(
            "kernel rows/cols must be the eigenvalues of the decompositions, in order".into(),
        ));
    }
    Ok(())
}

/// `U₁·(Φ ∘ (U₁*·T·U₂))·U₂*`.
pub fn doi_apply(
    phi: &DoiKernel,
    d1: &SpectralDecomposition,
    t: &CMatrix,
    d2: &SpectralDecomposition,
) -> Result<CMatrix> {
    check_kernel(phi, d1, d2)?;
    if t.shape() != (d1.dim(), d2.dim()) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", d1.dim(), d2.dim()),
            found: format!("{:?}", t.shape()),
        });
    }
    let inner = d1.unitary().adjoint() * t * d2.unitary();
    let product = inner.component_mul(&phi.values);
    Ok(d1.unitary() * product * d2.unitary().adjoint())
}

fn dd_kernels(
    f: &TrigPolynomial,
    d1: &SpectralDecomposition,
    d2: &SpectralDecomposition,
    eps_dd: Option<f64>,
) -> Result<(DoiKernel, DoiKernel)> {
    let (l, m) = (d1.eigenvalues(), d2.eigenvalues());
    let ex = eps_dd.unwrap_or_else(|| default_eps_dd(Axis::X, l, m));
    let ey = eps_dd.unwrap_or_else(|| default_eps_dd(Axis::Y, l, m));
    Ok((
        divided_difference_kernel(f, Axis::X, l, m, ex)?,
        divided_difference_kernel(f, Axis::Y, l, m, ey)?,
    ))
}

/// Right-hand side of the difference formula
/// `f(N₁) − f(N₂) = ∬ ∂ᵧf dE₁ (B₁ − B₂) dE₂ + ∬ ∂ₓf dE₁ (A₁ − A₂) dE₂`.
/// `eps_dd = None` uses [`default_eps_dd`] per axis.
pub fn rhs_difference_formula(
    f: &TrigPolynomial,
    d1: &SpectralDecomposition,
    d2: &SpectralDecomposition,
    eps_dd: Option<f64>,
) -> Result<CMatrix> {
    if d1.dim() != d2.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}", d1.dim()),
            found: format!("{}", d2.dim()),
        });
    }
    let (kx, ky) = dd_kernels(f, d1, d2, eps_dd)?;
    let (a1, b1) = d1.parts();
    let (a2, b2) = d2.parts();
    Ok(doi_apply(&ky, d1, &(b1 - b2), d2)? + doi_apply(&kx, d1, &(a1 - a2), d2)?)
}

/// Right-hand side of the quasicommutator formula for
/// `f(N₁)R − R·f(N₂)`, with `B₁R − RB₂` and `A₁R − RA₂` in place of the
/// differences of parts.
pub fn rhs_quasicommutator_formula(
    f: &TrigPolynomial,
    d1: &SpectralDecomposition,
    d2: &SpectralDecomposition,
    r: &CMatrix,
    eps_dd: Option<f64>,
) -> Result<CMatrix> {
    if r.shape() != (d1.dim(), d2.dim()) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", d1.dim(), d2.dim()),
            found: format!("{:?}", r.shape()),
        });
    }
    let (kx, ky) = dd_kernels(f, d1, d2, eps_dd)?;
    let (a1, b1) = d1.parts();
    let (a2, b2) = d2.parts();
    let qb = &b1 * r - r * &b2;
    let qa = &a1 * r - r * &a2;
    Ok(doi_apply(&ky, d1, &qb, d2)? + doi_apply(&kx, d1, &qa, d2)?)
}

/// Finite Haagerup factorization `Φⱼₖ ≈ Σₙ Aⱼₙ·Bₖₙ`.
///
/// `tolerance` is the admissible max-entry residual relative to
/// `max(1, max|Φ|)`. Residuals within it are not ignored: the bracket adds
/// a certified correction for them.
#[derive(Clone, Debug, PartialEq)]
pub struct HaagerupFactors {
    pub a: CMatrix,
    pub b: CMatrix,
    pub tolerance: f64,
}

impl HaagerupFactors {
    pub fn new(a: CMatrix, b: CMatrix) -> Self {
        Self { a, b, tolerance: 1e-10 }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// `√(maxⱼ Σₙ|Aⱼₙ|²) · √(maxₖ Σₙ|Bₖₙ|²)`.
    pub fn row_energy_product(&self) -> f64 {
        max_row_norm(&self.a) * max_row_norm(&self.b)
    }

    pub fn product(&self) -> CMatrix {
        &self.a * self.b.transpose()
    }

    /// Factor entries as CSV with header `side,row,n,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("side,row,n,re,im\n");
        for (side, m) in [("a", &self.a), ("b", &self.b)] {
            for r in 0..m.nrows() {
                for n in 0..m.ncols() {
                    let z = m[(r, n)];
                    let _ = writeln!(out, "{side},{r},{n},{:?},{:?}", z.re, z.im);
                }
            }
        }
        out
    }
}

fn max_row_norm(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

fn max_col_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Two-sided estimate of the Schur multiplier norm of a kernel on the
/// operator norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurBracket {
    pub lower: f64,
    pub upper: Option<f64>,
    /// Max-entry residual of the factorization, when one was supplied.
    pub factorization_residual: Option<f64>,
}

/// Multiplier-norm bracket.
///
/// `lower` is the best of `max|Φ|`, structured test matrices and `trials`
/// seeded Gaussian matrices. `upper`, when factors are given, is their row
/// energy product plus `min(max row ℓ², max column ℓ²)` of the residual
/// `Φ − ABᵀ`, itself a multiplier-norm bound for the residual.
pub fn schur_norm_bracket(
    phi: &DoiKernel,
    factors: Option<&HaagerupFactors>,
    trials: usize,
    seed: u64,
) -> Result<SchurBracket> {
    let values = &phi.values;
    let (rows, cols) = values.shape();
    let (mut upper, mut factorization_residual) = (None, None);
    if let Some(fac) = factors {
        if fac.a.nrows() != rows || fac.b.nrows() != cols || fac.a.ncols() != fac.b.ncols() {
            return Err(Error::DimensionMismatch {
                expected: format!("{rows}xN and {cols}xN factors"),
                found: format!("{:?} and {:?}", fac.a.shape(), fac.b.shape()),
            });
        }
        let residual = values - fac.product();
        let worst = residual.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let allowed = fac.tolerance * phi.max_abs().max(1.0);
        if !(worst <= allowed) {
            return Err(Error::InvalidFactorization { residual: worst, tolerance: allowed });
        }
        let correction = max_row_norm(&residual).min(max_col_norm(&residual));
        upper = Some(fac.row_energy_product() + correction);
        factorization_residual = Some(worst);
    }

    let mut lower = phi.max_abs();
    if rows > 0 && cols > 0 {
        let ratio = |t: &CMatrix| {
            let denom = operator_norm(t);
            if denom > 0.0 {
                operator_norm(&t.component_mul(values)) / denom
            } else {
                0.0
            }
        };
        let phase = |z: Complex64| if z.norm() > 0.0 { z.conj() / z.norm() } else { Complex64::new(1.0, 0.0) };
        let (j0, k0) = (0..rows * cols)
            .map(|i| (i / cols, i % cols))
            .max_by(|&(a, b), &(c, d)| values[(a, b)].norm().total_cmp(&values[(c, d)].norm()))
            .unwrap_or((0, 0));
        let structured = [
            CMatrix::from_element(rows, cols, Complex64::new(1.0, 0.0)),
            CMatrix::identity(rows, cols),
            CMatrix::from_fn(rows, cols, |j, k| phase(values[(j, k0)]) * phase(values[(j0, k)])),
            CMatrix::from_fn(rows, cols, |j, k| phase(values[(j, k)])),
        ];
        for t in &structured {
            lower = lower.max(ratio(t));
        }
        let random = map_indexed(Execution::Parallel, trials, |i| {
            let mut rng = trial_rng(seed, i as u64);
            ratio(&complex_gaussian(&mut rng, rows, cols))
        });
        lower = random.into_iter().fold(lower, f64::max);
    }
    Ok(SchurBracket { lower, upper, factorization_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, schatten_norm};
    use crate::spectral::{functional_calculus, random_normal, SpectrumBox};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_for_exponential_matches_hand_value() {
        let e = TrigPolynomial::exponential(1.0, 1, 0, c(1.0, 0.0));
        let k = divided_difference_kernel(&e, Axis::X, &[c(0.0, 0.0)], &[c(std::f64::consts::PI, 0.0)], 1e-7).unwrap();
        assert!((k.values()[(0, 0)] - c(-2.0 / std::f64::consts::PI, 0.0)).norm() < 1e-15);
        let ky = divided_difference_kernel(&e, Axis::Y, &[c(0.0, 0.0)], &[c(1.0, 3.0)], 1e-7).unwrap();
        assert_eq!(ky.values()[(0, 0)], c(0.0, 0.0));
        assert_eq!(ky.provenance(), KernelProvenance::Dy);
    }

    #[test]
    fn kernel_obeys_defining_relation() {
        let mut rng = trial_rng(1, 0);
        let f = TrigPolynomial::random(&mut rng, 1.0, 3.0, 8);
        let l: Vec<Complex64> = (0..5).map(|i| c(i as f64 * 0.7 - 1.0, 0.3 * i as f64)).collect();
        let m: Vec<Complex64> = (0..4).map(|i| c(1.1 - i as f64 * 0.5, -0.2 * i as f64)).collect();
        let k = divided_difference_kernel(&f, Axis::X, &l, &m, 1e-7).unwrap();
        for j in 0..5 {
            for q in 0..4 {
                let gap = l[j].re - m[q].re;
                if gap.abs() > 1e-7 {
                    let lhs = k.values()[(j, q)] * gap;
                    let rhs = f.evaluate(l[j].re, m[q].im) - f.evaluate(m[q].re, m[q].im);
                    assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
                }
            }
        }
        assert!(k.to_csv().starts_with("j,k,re,im\n0,0,"));
        assert_eq!(k.to_csv().lines().count(), 21);
    }

    #[test]
    fn apply_identity_and_left_multiplication() {
        let d1 = random_normal(4, &SpectrumBox::square(1.0), 1).unwrap();
        let d2 = random_normal(4, &SpectrumBox::square(1.0), 2).unwrap();
        let mut rng = trial_rng(3, 0);
        let t = complex_gaussian(&mut rng, 4, 4);
        let ones = DoiKernel::from_fn(d1.eigenvalues(), d2.eigenvalues(), |_, _| c(1.0, 0.0));
        assert!(frobenius(&(doi_apply(&ones, &d1, &t, &d2).unwrap() - &t)) <= 1e-13);
        let left = DoiKernel::from_fn(d1.eigenvalues(), d2.eigenvalues(), |l, _| l);
        let got = doi_apply(&left, &d1, &t, &d2).unwrap();
        assert!(frobenius(&(got - d1.matrix() * &t)) <= 1e-10);
        let wrong = DoiKernel::from_fn(d2.eigenvalues(), d2.eigenvalues(), |_, _| c(1.0, 0.0));
        assert!(matches!(doi_apply(&wrong, &d1, &t, &d2), Err(Error::KernelMismatch(_))));
    }

    #[test]
    fn hilbert_schmidt_bound() {
        for trial in 0..100u64 {
            let d1 = random_normal(5, &SpectrumBox::square(2.0), 10 + trial).unwrap();
            let d2 = random_normal(5, &SpectrumBox::square(2.0), 900 + trial).unwrap();
            let phi = DoiKernel::from_fn(d1.eigenvalues(), d2.eigenvalues(), |l, m| (l - m.conj()).exp());
            let mut rng = trial_rng(77, trial);
            let t = complex_gaussian(&mut rng, 5, 5);
            let out = doi_apply(&phi, &d1, &t, &d2).unwrap();
            assert!(frobenius(&out) <= phi.max_abs() * frobenius(&t) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn difference_formula_matches_oracle() {
        for trial in 0..30u64 {
            let dim = 2 + (trial as usize % 7);
            let d1 = random_normal(dim, &SpectrumBox::square(1.5), 2 * trial).unwrap();
            let d2 = random_normal(dim, &SpectrumBox::square(1.5), 2 * trial + 1).unwrap();
            let mut rng = trial_rng(5, trial);
            let f = TrigPolynomial::random(&mut rng, 0.5, 4.0, 12);
            let oracle = functional_calculus(|z| f.evaluate_at(z), &d1) - functional_calculus(|z| f.evaluate_at(z), &d2);
            let rhs = rhs_difference_formula(&f, &d1, &d2, None).unwrap();
            let scale = 1.0 + frobenius(&functional_calculus(|z| f.evaluate_at(z), &d1))
                + frobenius(&functional_calculus(|z| f.evaluate_at(z), &d2));
            assert!(frobenius(&(rhs - oracle)) <= 1e-9 * scale);
        }
    }

    #[test]
    fn linear_and_constant_cases() {
        let d1 = random_normal(4, &SpectrumBox::square(0.5), 6).unwrap();
        let d2 = random_normal(4, &SpectrumBox::square(0.5), 7).unwrap();
        let zero = TrigPolynomial::constant(1.0, c(3.0, 0.0));
        assert!(frobenius(&rhs_difference_formula(&zero, &d1, &d2, None).unwrap()) <= 1e-14);
        // f(x, y) = x + y is not a trigonometric polynomial; its divided
        // differences are identically one, so both kernels are all-ones.
        let ones = DoiKernel::from_fn(d1.eigenvalues(), d2.eigenvalues(), |_, _| c(1.0, 0.0));
        let (a1, b1) = d1.parts();
        let (a2, b2) = d2.parts();
        let rhs = doi_apply(&ones, &d1, &(&b1 - &b2), &d2).unwrap() + doi_apply(&ones, &d1, &(&a1 - &a2), &d2).unwrap();
        let oracle = (a1 + b1) - (a2 + b2);
        assert!(frobenius(&(rhs - oracle)) <= 1e-13);
        let e = TrigPolynomial::new(1.0, [((1, 0), c(1.0, 0.0)), ((0, 1), c(1.0, 0.0))]).unwrap();
        let rhs = rhs_difference_formula(&e, &d1, &d2, None).unwrap();
        let oracle = functional_calculus(|z| e.evaluate_at(z), &d1) - functional_calculus(|z| e.evaluate_at(z), &d2);
        assert!(frobenius(&(rhs - oracle)) <= 1e-12);
    }

    #[test]
    fn quasicommutator_formula_specializes() {
        let d1 = random_normal(5, &SpectrumBox::square(1.0), 8).unwrap();
        let d2 = random_normal(5, &SpectrumBox::square(1.0), 9).unwrap();
        let mut rng = trial_rng(10, 0);
        let f = TrigPolynomial::random(&mut rng, 1.0, 3.0, 10);
        let r = complex_gaussian(&mut rng, 5, 5);
        let eye = CMatrix::identity(5, 5);
        let a = rhs_quasicommutator_formula(&f, &d1, &d2, &eye, None).unwrap();
        let b = rhs_difference_formula(&f, &d1, &d2, None).unwrap();
        assert!(frobenius(&(a - b)) <= 1e-13);
        let f1 = functional_calculus(|z| f.evaluate_at(z), &d1);
        let f2 = functional_calculus(|z| f.evaluate_at(z), &d2);
        let oracle = &f1 * &r - &r * &f2;
        let rhs = rhs_quasicommutator_formula(&f, &d1, &d2, &r, None).unwrap();
        assert!(frobenius(&(rhs - oracle)) <= 1e-9 * (1.0 + frobenius(&f1) + frobenius(&f2)));
        assert!(rhs_quasicommutator_formula(&f, &d1, &d2, &CMatrix::identity(4, 4), None).is_err());
    }

    #[test]
    fn telescoping_spot_check_with_identity() {
        // With T = I the y-kernel weighted by (y₁ − y₂) telescopes to
        // f(x₁, y₁) − f(x₁, y₂) in the eigenbasis pairing.
        let d1 = random_normal(3, &SpectrumBox::square(1.0), 20).unwrap();
        let d2 = random_normal(3, &SpectrumBox::square(1.0), 21).unwrap();
        let mut rng = trial_rng(22, 0);
        let f = TrigPolynomial::random(&mut rng, 1.0, 2.0, 6);
        let ky = divided_difference_kernel(&f, Axis::Y, d1.eigenvalues(), d2.eigenvalues(), 1e-9).unwrap();
        let weighted = DoiKernel::from_fn(d1.eigenvalues(), d2.eigenvalues(), |l, m| {
            let j = d1.eigenvalues().iter().position(|z| *z == l).unwrap();
            let k = d2.eigenvalues().iter().position(|z| *z == m).unwrap();
            ky.values()[(j, k)] * (l.im - m.im)
        });
        let telescoped = DoiKernel::from_fn(d1.eigenvalues(), d2.eigenvalues(), |l, m| {
            f.evaluate(l.re, l.im) - f.evaluate(l.re, m.im)
        });
        let eye = CMatrix::identity(3, 3);
        let a = doi_apply(&weighted, &d1, &eye, &d2).unwrap();
        let b = doi_apply(&telescoped, &d1, &eye, &d2).unwrap();
        assert!(frobenius(&(a - b)) <= 1e-13);
    }

    #[test]
    fn bracket_for_rank_one_kernels() {
        let l: Vec<Complex64> = (0..4).map(|i| c(i as f64, 0.0)).collect();
        let ones = DoiKernel::from_fn(&l, &l, |_, _| c(1.0, 0.0));
        let fac = HaagerupFactors::new(CMatrix::from_element(4, 1, c(1.0, 0.0)), CMatrix::from_element(4, 1, c(1.0, 0.0)));
        let br = schur_norm_bracket(&ones, Some(&fac), 10, 1).unwrap();
        assert!((br.lower - 1.0).abs() < 1e-12);
        assert_eq!(br.upper, Some(1.0));

        let a = [c(0.5, 0.0), c(-2.0, 1.0), c(0.3, 0.0)];
        let b = [c(1.5, 0.0), c(0.0, -0.2)];
        let phi = DoiKernel::new(
            vec![c(0.0, 0.0); 3],
            vec![c(0.0, 0.0); 2],
            CMatrix::from_fn(3, 2, |j, k| a[j] * b[k]),
        )
        .unwrap();
        let fac = HaagerupFactors::new(
            CMatrix::from_fn(3, 1, |j, _| a[j]),
            CMatrix::from_fn(2, 1, |k, _| b[k]),
        );
        let br = schur_norm_bracket(&phi, Some(&fac), 10, 1).unwrap();
        let expected = 5f64.sqrt() * 1.5;
        assert!((br.upper.unwrap() - expected).abs() < 1e-12);
        assert!((br.lower - expected).abs() < 1e-12);

        let bad = HaagerupFactors::new(CMatrix::from_element(3, 1, c(1.0, 0.0)), CMatrix::from_element(2, 1, c(1.0, 0.0)));
        assert!(matches!(
            schur_norm_bracket(&phi, Some(&bad), 1, 1),
            Err(Error::InvalidFactorization { .. })
        ));
    }

    #[test]
    fn trace_class_transfer_with_factorization() {
        for trial in 0..20u64 {
            let d1 = random_normal(4, &SpectrumBox::square(1.0), 40 + trial).unwrap();
            let d2 = random_normal(4, &SpectrumBox::square(1.0), 80 + trial).unwrap();
            let mut rng = trial_rng(12, trial);
            let a = complex_gaussian(&mut rng, 4, 3);
            let b = complex_gaussian(&mut rng, 4, 3);
            let fac = HaagerupFactors::new(a, b);
            let phi = DoiKernel::new(d1.eigenvalues().to_vec(), d2.eigenvalues().to_vec(), fac.product()).unwrap();
            let br = schur_norm_bracket(&phi, Some(&fac), 20, trial).unwrap();
            let upper = br.upper.unwrap();
            assert!(br.lower <= upper + 1e-8);
            let t = complex_gaussian(&mut rng, 4, 4);
            let out = doi_apply(&phi, &d1, &t, &d2).unwrap();
            assert!(schatten_norm(&out, 1.0) <= upper * schatten_norm(&t, 1.0) * (1.0 + 1e-12));
        }
    }
}
