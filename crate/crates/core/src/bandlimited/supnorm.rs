use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::TrigPolynomial;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};

pub const DEFAULT_REFINEMENT: usize = 256;
pub const MAX_REFINEMENT: usize = 4096;
const TARGET_RELATIVE_WIDTH: f64 = 1e-6;

/// Certified bracket `lower ≤ ‖f‖∞ ≤ upper`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupBracket {
    pub lower: f64,
    pub upper: f64,
    pub refinement: usize,
}

impl SupBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

fn grid_ratio(f: &TrigPolynomial, m: usize) -> f64 {
    let spacing = f.period() / m as f64;
    f.support_radius() * spacing * std::f64::consts::FRAC_1_SQRT_2
}

/// Sup-norm bracket from the `m × m` periodic grid.
///
/// `lower` is the grid maximum. Every point of the plane lies within
/// `δ·√2/2` of a node (δ the grid spacing), and the Bernstein bound
/// `‖∇f‖∞ ≤ σ‖f‖∞` then gives `‖f‖∞ ≤ lower / (1 − σ·δ·√2/2)`.
pub fn sup_norm(f: &TrigPolynomial, m: usize) -> Result<SupBracket> {
    if m == 0 {
        return Err(Error::invalid("refinement must be positive"));
    }
    if f.is_zero() {
        return Ok(SupBracket { lower: 0.0, upper: 0.0, refinement: m });
    }
    let ratio = grid_ratio(f, m);
    if ratio >= 1.0 {
        return Err(Error::RefinementTooCoarse {
            refinement: m,
            sigma: f.support_radius(),
            ratio,
        });
    }
    let lower = grid_max(f, m);
    Ok(SupBracket {
        lower,
        upper: lower / (1.0 - ratio),
        refinement: m,
    })
}

/// Sup-norm bracket at the default refinement: start at 256 nodes per
/// period and double until the relative width drops below 1e−6 or the grid
/// reaches 4096.
pub fn sup_norm_default(f: &TrigPolynomial) -> Result<SupBracket> {
    if f.is_zero() {
        return Ok(SupBracket { lower: 0.0, upper: 0.0, refinement: DEFAULT_REFINEMENT });
    }
    let mut m = DEFAULT_REFINEMENT;
    loop {
        let ratio = grid_ratio(f, m);
        let converged = ratio < 1.0 && ratio / (1.0 - ratio) < TARGET_RELATIVE_WIDTH;
        if converged || m >= MAX_REFINEMENT {
            break;
        }
        m *= 2;
    }
    sup_norm(f, m)
}

/// Maximum of `|f|` over the `m × m` grid via a separable inverse FFT.
fn grid_max(f: &TrigPolynomial, m: usize) -> f64 {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(m);
    let wrap = |i: i64| i.rem_euclid(m as i64) as usize;

    // Stage 1: transform along k for each occupied row j.
    let mut rows: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
    for (&(j, k), &c) in f.coeffs() {
        let row = rows
            .entry(wrap(j))
            .or_insert_with(|| vec![Complex64::new(0.0, 0.0); m]);
        row[wrap(k)] += c;
    }
    for row in rows.values_mut() {
        fft.process(row);
    }
    let rows: Vec<(usize, Vec<Complex64>)> = rows.into_iter().collect();

    // Stage 2: for each column b, transform along j.
    const CHUNK: usize = 64;
    let chunks = m.div_ceil(CHUNK);
    let maxima = map_indexed(Execution::Parallel, chunks, |ci| {
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut best: f64 = 0.0;
        for b in (ci * CHUNK)..((ci + 1) * CHUNK).min(m) {
            buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for (j, row) in &rows {
                buf[*j] = row[b];
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for z in &buf {
                best = best.max(z.norm());
            }
        }
        best
    });
    maxima.into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandlimited::Axis;
    use crate::exec::trial_rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn direct_grid_max(f: &TrigPolynomial, m: usize) -> f64 {
        let d = f.period() / m as f64;
        let mut best: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                best = best.max(f.evaluate(a as f64 * d, b as f64 * d).norm());
            }
        }
        best
    }

    #[test]
    fn constant_bracket_is_exact() {
        let one = TrigPolynomial::constant(1.0, c(1.0, 0.0));
        let b = sup_norm_default(&one).unwrap();
        assert_eq!(b.lower, 1.0);
        assert_eq!(b.upper, 1.0);
    }

    #[test]
    fn exponential_bracket_contains_one() {
        let e = TrigPolynomial::exponential(1.0, 1, 0, c(1.0, 0.0));
        let b = sup_norm_default(&e).unwrap();
        assert!(b.lower <= 1.0 + 1e-15 && b.upper >= 1.0 - 1e-15);
        assert!((b.lower - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fft_grid_matches_direct_evaluation() {
        let mut rng = trial_rng(4, 0);
        let f = TrigPolynomial::random(&mut rng, 1.0, 5.0, 15);
        for m in [32, 64] {
            let fast = grid_max(&f, m);
            let slow = direct_grid_max(&f, m);
            assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let f = TrigPolynomial::exponential(1.0, 8, 0, c(1.0, 0.0));
        assert!(matches!(sup_norm(&f, 16), Err(Error::RefinementTooCoarse { .. })));
    }

    #[test]
    fn bracket_width_shrinks_linearly_under_doubling() {
        let mut rng = trial_rng(5, 0);
        let f = TrigPolynomial::random(&mut rng, 1.0, 4.0, 12);
        let widths: Vec<f64> = [128, 256, 512, 1024]
            .iter()
            .map(|&m| sup_norm(&f, m).unwrap().width())
            .collect();
        for w in widths.windows(2) {
            let ratio = w[1] / w[0];
            assert!(ratio > 0.4 && ratio < 0.6, "width ratio {ratio}");
        }
    }

    #[test]
    fn random_points_never_exceed_upper() {
        use rand::Rng;
        let mut rng = trial_rng(6, 0);
        let f = TrigPolynomial::random(&mut rng, 1.0, 6.0, 18);
        let b = sup_norm(&f, 512).unwrap();
        assert!(b.lower <= b.upper);
        let p = f.period();
        for _ in 0..100_000 {
            let (x, y) = (rng.random::<f64>() * p, rng.random::<f64>() * p);
            assert!(f.evaluate(x, y).norm() <= b.upper);
        }
    }

    #[test]
    fn bernstein_on_random_polynomials() {
        for seed in 0..100 {
            let mut rng = trial_rng(7, seed);
            let f = TrigPolynomial::random(&mut rng, 1.0, 4.0, 8);
            let sigma = f.support_radius();
            let fb = sup_norm(&f, 256).unwrap();
            let db = sup_norm(&f.partial_derivative(Axis::X), 256).unwrap();
            assert!(db.lower <= sigma * fb.upper * (1.0 + 1e-12));
        }
    }
}
