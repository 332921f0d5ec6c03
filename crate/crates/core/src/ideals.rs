//! Singular-value functionals of quasinormed operator ideals.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, trial_rng, Execution};
use crate::linalg::CMatrix;

/// Finite nonincreasing sequence of nonnegative reals, implicitly padded
/// with zeros.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("singular values must be finite and nonnegative"));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid("singular values must be nonincreasing"));
        }
        Ok(Self { values })
    }

    /// Sorts into nonincreasing order; negative or non-finite entries are
    /// rejected.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `s_j`, zero beyond the stored length.
    pub fn get(&self, j: usize) -> f64 {
        self.values.get(j).copied().unwrap_or(0.0)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect())
    }

    /// One value per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for v in &self.values {
            let _ = writeln!(out, "{v:?}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let values = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<f64>().map_err(|e| Error::Parse(format!("`{l}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

impl TryFrom<Vec<f64>> for SingularSpectrum {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SingularSpectrum> for Vec<f64> {
    fn from(s: SingularSpectrum) -> Self {
        s.values
    }
}

pub fn singular_values(t: &CMatrix) -> SingularSpectrum {
    SingularSpectrum::new(crate::linalg::singular_values(t)).expect("Jacobi singular values are sorted and nonnegative")
}

/// `σₙ = (1/(n+1))·Σ_{j≤n} s_j`
pub fn sigma_averages(s: &SingularSpectrum) -> Vec<f64> {
    let mut acc = 0.0;
    s.values
        .iter()
        .enumerate()
        .map(|(n, v)| {
            acc += v;
            acc / (n + 1) as f64
        })
        .collect()
}

/// Ideal descriptor. JSON: `{"variant": "Sp", "p": 2}`,
/// `{"variant": "TruncHead", "l": 3, "base": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", try_from = "IdealSpecRepr")]
pub enum IdealSpec {
    /// `(Σ s_j^p)^{1/p}`
    Sp { p: f64 },
    /// `sup_j (1+j)^{1/p}·s_j`
    SpWeak { p: f64 },
    /// `Ψ_base(s_0, …, s_l, 0, …)`
    TruncHead { l: usize, base: Box<IdealSpec> },
    /// `Ψ_base(s^p)^{1/p}`
    PowerScale { p: f64, base: Box<IdealSpec> },
}

#[derive(Deserialize)]
#[serde(tag = "variant")]
enum IdealSpecRepr {
    Sp { p: f64 },
    SpWeak { p: f64 },
    TruncHead { l: usize, base: Box<IdealSpec> },
    PowerScale { p: f64, base: Box<IdealSpec> },
}

impl TryFrom<IdealSpecRepr> for IdealSpec {
    type Error = Error;

    fn try_from(r: IdealSpecRepr) -> Result<Self> {
        let spec = match r {
            IdealSpecRepr::Sp { p } => IdealSpec::Sp { p },
            IdealSpecRepr::SpWeak { p } => IdealSpec::SpWeak { p },
            IdealSpecRepr::TruncHead { l, base } => IdealSpec::TruncHead { l, base },
            IdealSpecRepr::PowerScale { p, base } => IdealSpec::PowerScale { p, base },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl IdealSpec {
    pub fn sp(p: f64) -> Result<Self> {
        let s = IdealSpec::Sp { p };
        s.validate()?;
        Ok(s)
    }

    pub fn sp_weak(p: f64) -> Result<Self> {
        let s = IdealSpec::SpWeak { p };
        s.validate()?;
        Ok(s)
    }

    pub fn trunc_head(l: usize, base: IdealSpec) -> Self {
        IdealSpec::TruncHead { l, base: Box::new(base) }
    }

    pub fn power_scale(p: f64, base: IdealSpec) -> Result<Self> {
        let s = IdealSpec::PowerScale { p, base: Box::new(base) };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            IdealSpec::Sp { p } | IdealSpec::SpWeak { p } => check_exponent(*p),
            IdealSpec::TruncHead { base, .. } => base.validate(),
            IdealSpec::PowerScale { p, base } => {
                check_exponent(*p)?;
                base.validate()
            }
        }
    }

    /// Known closed form of `β_{𝔍,d}`.
    pub fn analytic_beta(&self, d: usize) -> Option<f64> {
        match self {
            IdealSpec::Sp { p } | IdealSpec::SpWeak { p } => Some((d as f64).powf(1.0 / p)),
            IdealSpec::PowerScale { p, base } => base.analytic_beta(d).map(|b| b.powf(1.0 / p)),
            IdealSpec::TruncHead { .. } => None,
        }
    }

    /// Known upper Boyd index.
    pub fn analytic_boyd_index(&self) -> Option<f64> {
        match self {
            IdealSpec::Sp { p } | IdealSpec::SpWeak { p } => Some(1.0 / p),
            IdealSpec::PowerScale { p, base } => base.analytic_boyd_index().map(|b| b / p),
            IdealSpec::TruncHead { .. } => None,
        }
    }

    /// Bound `3/(1 − 2^{b−1})` on the averaging constant from a known index
    /// `b < 1`. A head-truncated ideal inherits the bound of its base.
    pub fn averaging_bound(&self) -> Option<f64> {
        match self {
            IdealSpec::TruncHead { base, .. } => base.averaging_bound(),
            _ => self
                .analytic_boyd_index()
                .filter(|&b| b < 1.0)
                .map(|b| 3.0 / (1.0 - 2f64.powf(b - 1.0))),
        }
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("ideal exponent must be positive and finite, got {p}")))
    }
}

fn psi_slice(spec: &IdealSpec, s: &[f64]) -> f64 {
    match spec {
        IdealSpec::Sp { p } => {
            let top = s.iter().copied().fold(0.0, f64::max);
            if top == 0.0 {
                return 0.0;
            }
            top * s.iter().map(|v| (v / top).powf(*p)).sum::<f64>().powf(1.0 / p)
        }
        IdealSpec::SpWeak { p } => s
            .iter()
            .enumerate()
            .map(|(j, v)| ((1 + j) as f64).powf(1.0 / p) * v)
            .fold(0.0, f64::max),
        IdealSpec::TruncHead { l, base } => psi_slice(base, &s[..s.len().min(l + 1)]),
        IdealSpec::PowerScale { p, base } => {
            let powered: Vec<f64> = s.iter().map(|v| v.powf(*p)).collect();
            psi_slice(base, &powered).powf(1.0 / p)
        }
    }
}

/// `Ψ_𝔍(s)`.
pub fn psi_norm(spec: &IdealSpec, s: &SingularSpectrum) -> f64 {
    psi_slice(spec, &s.values)
}

/// `[T]_d`: each singular value repeated `d` times.
pub fn dilate_spectrum(s: &SingularSpectrum, d: usize) -> Result<SingularSpectrum> {
    if d == 0 {
        return Err(Error::invalid("dilation factor must be at least 1"));
    }
    Ok(SingularSpectrum {
        values: s.values.iter().flat_map(|&v| std::iter::repeat_n(v, d)).collect(),
    })
}

/// Closed set of test spectra for lower estimates of `β_{𝔍,d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFamily {
    pub spectra: Vec<SingularSpectrum>,
}

impl TestFamily {
    /// Geometric `r^j` (r ∈ {0.99, 0.9, 0.5}), power law `(1+j)^{−γ}`
    /// (γ ∈ {0.25, 0.5, …, 2}) and indicators of length 1, 2, 4, …, 256,
    /// each of length 512.
    pub fn standard() -> Self {
        const LEN: usize = 512;
        let mut spectra = Vec::new();
        for r in [0.99f64, 0.9, 0.5] {
            spectra.push((0..LEN).map(|j| r.powi(j as i32)).collect::<Vec<_>>());
        }
        for k in 1..=8 {
            let gamma = 0.25 * k as f64;
            spectra.push((0..LEN).map(|j| ((1 + j) as f64).powf(-gamma)).collect());
        }
        for k in 0..=8 {
            let len = 1usize << k;
            spectra.push((0..LEN).map(|j| if j < len { 1.0 } else { 0.0 }).collect());
        }
        Self {
            spectra: spectra
                .into_iter()
                .map(|v| SingularSpectrum::new(v).expect("test spectra are nonincreasing"))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    /// Certified lower bound `max Ψ([s]_d)/Ψ(s)` over the family.
    pub estimate: f64,
    pub analytic: Option<f64>,
}

pub fn beta_d_estimate(spec: &IdealSpec, d: usize, family: &TestFamily) -> Result<BetaEstimate> {
    let mut estimate: f64 = if d == 1 { 1.0 } else { 0.0 };
    if d > 1 {
        for s in &family.spectra {
            let base = psi_norm(spec, s);
            if base > 0.0 {
                estimate = estimate.max(psi_norm(spec, &dilate_spectrum(s, d)?) / base);
            }
        }
    }
    Ok(BetaEstimate { estimate, analytic: spec.analytic_beta(d) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoydEstimate {
    pub estimate: f64,
    pub analytic: Option<f64>,
}

/// `min over d ∈ {2, 4, …, d_max} of log β_d / log d`.
pub fn boyd_index_estimate(spec: &IdealSpec, d_max: usize, family: &TestFamily) -> Result<BoydEstimate> {
    if d_max < 2 {
        return Err(Error::invalid("d_max must be at least 2"));
    }
    let mut estimate = f64::INFINITY;
    let mut d = 2;
    while d <= d_max {
        let beta = beta_d_estimate(spec, d, family)?.estimate;
        estimate = estimate.min(beta.ln() / (d as f64).ln());
        d *= 2;
    }
    Ok(BoydEstimate { estimate, analytic: spec.analytic_boyd_index() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragingCheck {
    /// `max Ψ(σ)/Ψ(s)` over the random spectra.
    pub empirical: f64,
    pub bound: Option<f64>,
}

/// Random nonincreasing spectrum: power-law, geometric or flat-then-drop
/// profiles with random lengths and multiplicative noise.
pub fn random_spectrum<R: Rng + ?Sized>(rng: &mut R) -> SingularSpectrum {
    let len = rng.random_range(1..=256usize);
    let kind = rng.random_range(0..3u8);
    let mut v: Vec<f64> = (0..len)
        .map(|j| {
            let base = match kind {
                0 => ((1 + j) as f64).powf(-rng.random_range(0.0..3.0)),
                1 => rng.random_range(0.5..1.0f64).powi(j as i32),
                _ => {
                    if j < len / 2 + 1 {
                        1.0
                    } else {
                        rng.random_range(0.0..1.0)
                    }
                }
            };
            base * rng.random_range(0.5..1.5)
        })
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    SingularSpectrum::new(v).expect("sorted positive values")
}

pub fn averaging_constant_check(spec: &IdealSpec, trials: usize, seed: u64, exec: Execution) -> AveragingCheck {
    let ratios = map_indexed(exec, trials, |i| {
        let mut rng = trial_rng(seed, i as u64);
        let s = random_spectrum(&mut rng);
        let sigma = SingularSpectrum { values: sigma_averages(&s) };
        let base = psi_norm(spec, &s);
        if base > 0.0 {
            psi_norm(spec, &sigma) / base
        } else {
            0.0
        }
    });
    AveragingCheck {
        empirical: ratios.into_iter().fold(0.0, f64::max),
        bound: spec.averaging_bound(),
    }
}

/// True iff `σ_l(s2) ≤ σ_l(s1)` for every `l` (zero padded).
pub fn majorization_le(s1: &SingularSpectrum, s2: &SingularSpectrum) -> bool {
    let n = s1.len().max(s2.len());
    let (mut a1, mut a2) = (0.0, 0.0);
    for l in 0..n {
        a1 += s1.get(l);
        a2 += s2.get(l);
        if a2 > a1 {
            return false;
        }
    }
    true
}

/// `(Σ_{j≤l} s_j^p)^{1/p}`; `p = ∞` gives `s_0`.
pub fn ky_fan_schatten(s: &SingularSpectrum, p: f64, l: usize) -> f64 {
    let head = &s.values[..s.len().min(l + 1)];
    if p.is_infinite() {
        return head.first().copied().unwrap_or(0.0);
    }
    psi_slice(&IdealSpec::Sp { p }, head)
}

/// `‖T₁T₂‖_{S_r^l} − ‖T₁‖_{S_p^l}·‖T₂‖_{S_q^l}` for `1/p + 1/q = 1/r`.
pub fn kyfan_holder_check(t1: &CMatrix, t2: &CMatrix, p: f64, q: f64, r: f64, l: usize) -> Result<f64> {
    if ((1.0 / p + 1.0 / q) - 1.0 / r).abs() > 1e-12 {
        return Err(Error::ExponentMismatch { p, q, r });
    }
    if t1.ncols() != t2.nrows() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} rows", t1.ncols()),
            found: format!("{}", t2.nrows()),
        });
    }
    let lhs = ky_fan_schatten(&singular_values(&(t1 * t2)), r, l);
    let rhs = ky_fan_schatten(&singular_values(t1), p, l) * ky_fan_schatten(&singular_values(t2), q, l);
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_gaussian, frobenius, random_unitary};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn spec(v: &[f64]) -> SingularSpectrum {
        SingularSpectrum::new(v.to_vec()).unwrap()
    }

    fn power_norm(t: &CMatrix, iters: usize) -> f64 {
        let mut x = CMatrix::from_element(t.ncols(), 1, Complex64::new(1.0, 0.3));
        let mut est = 0.0;
        for _ in 0..iters {
            let y = t.adjoint() * (t * &x);
            let n = y.norm();
            est = n.sqrt();
            x = y / Complex64::new(n, 0.0);
        }
        est
    }

    #[test]
    fn singular_value_examples() {
        let mut rng = trial_rng(1, 0);
        let u = random_unitary(&mut rng, 5);
        assert!(singular_values(&u).values().iter().all(|s| (s - 1.0).abs() < 1e-13));
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 2.0),
        ]));
        assert_eq!(singular_values(&d).values(), &[3.0, 2.0, 1.0]);
        let a = complex_gaussian(&mut rng, 4, 1);
        let b = complex_gaussian(&mut rng, 4, 1);
        let s = singular_values(&(&a * b.adjoint()));
        assert!((s.get(0) - a.norm() * b.norm()).abs() < 1e-12);
        assert!(s.values()[1..].iter().all(|v| *v < 1e-12));
    }

    #[test]
    fn svd_consistency() {
        for trial in 0..20 {
            let mut rng = trial_rng(2, trial);
            let t = complex_gaussian(&mut rng, 6, 4);
            let s = singular_values(&t);
            let energy: f64 = s.values().iter().map(|v| v * v).sum();
            assert!((energy - frobenius(&t).powi(2)).abs() <= 1e-10 * energy);
            let pn = power_norm(&t, 3000);
            assert!((s.get(0) - pn).abs() <= 1e-8 * s.get(0));
        }
    }

    #[test]
    fn averages() {
        assert_eq!(sigma_averages(&spec(&[2.0, 2.0, 2.0])), vec![2.0, 2.0, 2.0]);
        let a = sigma_averages(&spec(&[1.0, 0.0, 0.0]));
        assert_eq!(a, vec![1.0, 0.5, 1.0 / 3.0]);
        for trial in 0..100 {
            let s = random_spectrum(&mut trial_rng(3, trial));
            for (n, sig) in sigma_averages(&s).iter().enumerate() {
                assert!(*sig >= s.get(n) * (1.0 - 1e-15));
            }
        }
    }

    #[test]
    fn psi_examples() {
        assert!((psi_norm(&IdealSpec::sp(2.0).unwrap(), &spec(&[4.0, 3.0])) - 5.0).abs() < 1e-15);
        let weak = psi_norm(&IdealSpec::sp_weak(1.0).unwrap(), &spec(&[1.0, 0.5, 1.0 / 3.0, 0.25]));
        assert!((weak - 1.0).abs() < 1e-15);
        let head = IdealSpec::trunc_head(0, IdealSpec::sp(1.0).unwrap());
        assert_eq!(psi_norm(&head, &spec(&[7.0, 3.0, 1.0])), 7.0);
    }

    #[test]
    fn dilation() {
        let s = spec(&[2.0, 1.0]);
        assert_eq!(dilate_spectrum(&s, 1).unwrap(), s);
        assert_eq!(dilate_spectrum(&s, 2).unwrap().values(), &[2.0, 2.0, 1.0, 1.0]);
        for p in [0.5, 1.0, 2.0, 3.0] {
            let sp = IdealSpec::sp(p).unwrap();
            let r = random_spectrum(&mut trial_rng(4, p as u64));
            for d in [2, 3, 8] {
                let lhs = psi_norm(&sp, &dilate_spectrum(&r, d).unwrap());
                let rhs = (d as f64).powf(1.0 / p) * psi_norm(&sp, &r);
                assert!((lhs - rhs).abs() <= 1e-12 * rhs);
            }
        }
    }

    #[test]
    fn beta_and_boyd() {
        let fam = TestFamily::standard();
        let sp2 = IdealSpec::sp(2.0).unwrap();
        assert_eq!(beta_d_estimate(&sp2, 1, &fam).unwrap().estimate, 1.0);
        assert!((beta_d_estimate(&sp2, 4, &fam).unwrap().estimate - 2.0).abs() < 1e-12);
        for p in [1.0, 4.0 / 3.0, 2.0, 4.0] {
            let b = boyd_index_estimate(&IdealSpec::sp(p).unwrap(), 64, &fam).unwrap();
            assert!((b.estimate - 1.0 / p).abs() < 1e-6);
            let w = IdealSpec::sp_weak(p).unwrap();
            for d in [2, 4, 8] {
                let est = beta_d_estimate(&w, d, &fam).unwrap();
                let target = est.analytic.unwrap();
                assert!((est.estimate - target).abs() <= 0.05 * target);
            }
        }
        let ps = IdealSpec::power_scale(2.0, IdealSpec::sp(1.0).unwrap()).unwrap();
        let b = boyd_index_estimate(&ps, 64, &fam).unwrap();
        assert!((b.estimate - 0.5).abs() < 1e-6);
        assert_eq!(b.analytic, Some(0.5));
        let head = IdealSpec::trunc_head(1000, IdealSpec::sp(1.0).unwrap());
        let b = boyd_index_estimate(&head, 16, &fam).unwrap();
        assert!((b.estimate - 1.0).abs() < 1e-6);
        assert_eq!(b.analytic, None);
    }

    #[test]
    fn beta_estimates_are_submultiplicative() {
        let fam = TestFamily::standard();
        for spec in [IdealSpec::sp(1.5).unwrap(), IdealSpec::sp_weak(2.0).unwrap()] {
            for (d1, d2) in [(2, 2), (2, 4), (4, 4)] {
                let a = beta_d_estimate(&spec, d1, &fam).unwrap().estimate;
                let b = beta_d_estimate(&spec, d2, &fam).unwrap().estimate;
                let ab = beta_d_estimate(&spec, d1 * d2, &fam).unwrap().estimate;
                assert!(ab <= a * b * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn averaging_constants() {
        let sp2 = IdealSpec::sp(2.0).unwrap();
        let bound = sp2.averaging_bound().unwrap();
        assert!((bound - 3.0 / (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
        assert!((bound - 10.243).abs() < 1e-3);
        let check = averaging_constant_check(&sp2, 500, 5, Execution::Parallel);
        assert!(check.empirical <= bound);
        assert!(IdealSpec::sp(1.0).unwrap().averaging_bound().is_none());
        let flat = spec(&[1.5; 10]);
        let sigma = SingularSpectrum::new(sigma_averages(&flat)).unwrap();
        assert_eq!(psi_norm(&sp2, &sigma) / psi_norm(&sp2, &flat), 1.0);
        let head = IdealSpec::trunc_head(3, sp2.clone());
        let h = averaging_constant_check(&head, 500, 5, Execution::Sequential);
        assert!(h.empirical <= bound);
    }

    #[test]
    fn majorization_examples() {
        let s = spec(&[3.0, 1.0]);
        assert!(majorization_le(&s, &s));
        assert!(majorization_le(&spec(&[2.0, 0.0]), &spec(&[1.0, 1.0])));
        assert!(!majorization_le(&spec(&[1.0, 0.0]), &spec(&[0.6, 0.6])));
    }

    #[test]
    fn ky_fan_holder() {
        let mut rng = trial_rng(6, 0);
        let t1 = complex_gaussian(&mut rng, 4, 4);
        let eye = CMatrix::identity(4, 4);
        assert!(kyfan_holder_check(&t1, &eye, 3.0, f64::INFINITY, 3.0, 2).unwrap() <= 1e-12);
        assert!(matches!(
            kyfan_holder_check(&t1, &eye, 2.0, 2.0, 2.0, 2),
            Err(Error::ExponentMismatch { .. })
        ));
        // Diagonal case: sequence-level Hölder.
        let a = [3.0, 2.0, 0.5];
        let b = [1.0, 4.0, 2.0];
        let d = |v: &[f64]| CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, v.iter().map(|x| Complex64::new(*x, 0.0))));
        let r = kyfan_holder_check(&d(&a), &d(&b), 2.0, 2.0, 1.0, 2).unwrap();
        let prod: f64 = [8.0, 3.0, 1.0].iter().sum();
        let rhs = a.iter().map(|x| x * x).sum::<f64>().sqrt() * b.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((r - (prod - rhs)).abs() < 1e-12);
        for trial in 0..100 {
            let mut rng = trial_rng(7, trial);
            let t1 = complex_gaussian(&mut rng, 5, 5);
            let t2 = complex_gaussian(&mut rng, 5, 5);
            assert!(kyfan_holder_check(&t1, &t2, 2.0, 2.0, 1.0, 3).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn spec_json_and_csv() {
        let s = IdealSpec::trunc_head(3, IdealSpec::sp(2.0).unwrap());
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"variant":"TruncHead","l":3,"base":{"variant":"Sp","p":2.0}}"#);
        assert_eq!(serde_json::from_str::<IdealSpec>(&j).unwrap(), s);
        assert!(serde_json::from_str::<IdealSpec>(r#"{"variant":"Sp","p":-1}"#).is_err());
        let sp = spec(&[3.0, 0.5, 0.125]);
        assert_eq!(SingularSpectrum::from_csv(&sp.to_csv()).unwrap(), sp);
        assert!(SingularSpectrum::from_csv("1\n2\n").is_err());
    }

    fn arb_spec() -> impl Strategy<Value = IdealSpec> {
        let leaf = prop_oneof![
            (0.25f64..4.0).prop_map(|p| IdealSpec::Sp { p }),
            (0.25f64..4.0).prop_map(|p| IdealSpec::SpWeak { p }),
        ];
        leaf.prop_recursive(2, 4, 1, |inner| {
            prop_oneof![
                (0usize..20, inner.clone()).prop_map(|(l, b)| IdealSpec::TruncHead { l, base: Box::new(b) }),
                (0.25f64..4.0, inner).prop_map(|(p, b)| IdealSpec::PowerScale { p, base: Box::new(b) }),
            ]
        })
    }

    fn arb_spectrum() -> impl Strategy<Value = SingularSpectrum> {
        prop::collection::vec(0.0f64..10.0, 0..40).prop_map(|v| SingularSpectrum::from_unsorted(v).unwrap())
    }

    proptest! {
        #[test]
        fn psi_is_homogeneous(spec in arb_spec(), s in arb_spectrum(), c in 0.0f64..5.0) {
            let lhs = psi_norm(&spec, &s.scaled(c).unwrap());
            let rhs = c * psi_norm(&spec, &s);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
        }

        #[test]
        fn psi_is_monotone(spec in arb_spec(), s in arb_spectrum(), bump in prop::collection::vec(0.0f64..1.0, 40)) {
            let bigger: Vec<f64> = s.values().iter().zip(&bump).map(|(v, b)| v * (1.0 + b)).collect();
            let bigger = SingularSpectrum::from_unsorted(bigger).unwrap();
            prop_assert!(psi_norm(&spec, &s) <= psi_norm(&spec, &bigger) * (1.0 + 1e-12));
        }
    }
}
