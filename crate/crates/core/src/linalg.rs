//! Dense complex linear algebra kernels: cyclic Jacobi for Hermitian
//! matrices, one-sided Jacobi singular values, phase-fixed QR.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;

const JACOBI_MAX_SWEEPS: usize = 60;
const JACOBI_REL_TOL: f64 = 1e-13;

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `U · diag(d) · U*`
pub fn unitary_congruence(u: &CMatrix, d: &[Complex64]) -> CMatrix {
    let mut scaled = u.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= d[j];
    }
    &scaled * u.adjoint()
}

/// Hermitian part `(M + M*)/2` and skew part `(M − M*)/(2i)`.
pub fn cartesian_parts(m: &CMatrix) -> (CMatrix, CMatrix) {
    let adj = m.adjoint();
    let a = (m + &adj) * Complex64::new(0.5, 0.0);
    let b = (m - &adj) * Complex64::new(0.0, -0.5);
    (a, b)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    pub sweeps: usize,
}

/// Complex 2×2 Jacobi rotation annihilating the off-diagonal entry `g` of
/// the Hermitian block `[[app, g], [conj g, aqq]]`. Returns `(G_pp, G_pq,
/// G_qp, G_qq)` of the unitary `G` with `G* H G` diagonal on the block.
fn jacobi_rotation(app: f64, aqq: f64, g: Complex64) -> (Complex64, Complex64, Complex64, Complex64) {
    let mag = g.norm();
    let phase = g / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let e = phase.conj();
    (
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
        -e * s,
        e * c,
    )
}

fn off_diagonal_norm(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                acc += h[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi eigensolver for Hermitian input. The input is Hermitized
/// first, so tiny skew-Hermitian rounding is ignored.
pub fn hermitian_eigen(h: &CMatrix) -> HermitianEigen {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "hermitian_eigen expects a square matrix");
    let mut a = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v = identity(n);
    let scale = frobenius(&a);
    let mut sweeps = 0;
    if scale > 0.0 {
        while sweeps < JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&a) <= JACOBI_REL_TOL * scale {
                break;
            }
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    let g = a[(p, q)];
                    if g.norm() <= f64::MIN_POSITIVE * 1e3 {
                        continue;
                    }
                    let (gpp, gpq, gqp, gqq) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, g);
                    // columns: A <- A G
                    for r in 0..n {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        a[(r, p)] = arp * gpp + arq * gqp;
                        a[(r, q)] = arp * gpq + arq * gqq;
                    }
                    // rows: A <- G* A
                    for c in 0..n {
                        let apc = a[(p, c)];
                        let aqc = a[(q, c)];
                        a[(p, c)] = gpp.conj() * apc + gqp.conj() * aqc;
                        a[(q, c)] = gpq.conj() * apc + gqq.conj() * aqc;
                    }
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                    for r in 0..n {
                        let vrp = v[(r, p)];
                        let vrq = v[(r, q)];
                        v[(r, p)] = vrp * gpp + vrq * gqp;
                        v[(r, q)] = vrp * gpq + vrq * gqq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen {
        values,
        vectors,
        sweeps,
    }
}

/// Singular values by one-sided (Hestenes) Jacobi, sorted nonincreasing.
pub fn singular_values(t: &CMatrix) -> Vec<f64> {
    // Orthogonalize the columns of whichever orientation has fewer columns.
    let mut w = if t.ncols() <= t.nrows() {
        t.clone()
    } else {
        t.adjoint()
    };
    let n = w.ncols();
    let m = w.nrows();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    let x = w[(r, p)];
                    let y = w[(r, q)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let (gpp, gpq, gqp, gqq) = jacobi_rotation(alpha, beta, gamma);
                for r in 0..m {
                    let x = w[(r, p)];
                    let y = w[(r, q)];
                    w[(r, p)] = x * gpp + y * gqp;
                    w[(r, q)] = x * gpq + y * gqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn operator_norm(t: &CMatrix) -> f64 {
    if t.is_empty() {
        return 0.0;
    }
    singular_values(t).first().copied().unwrap_or(0.0)
}

/// Schatten p-norm; `p = ∞` gives the operator norm.
pub fn schatten_norm(t: &CMatrix, p: f64) -> f64 {
    let s = singular_values(t);
    if p.is_infinite() {
        return s.first().copied().unwrap_or(0.0);
    }
    s.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    })
}

/// Q factor of a QR decomposition with positive diagonal in R, by modified
/// Gram–Schmidt with one reorthogonalization pass.
pub fn qr_unitary(m: &CMatrix) -> CMatrix {
    let (rows, cols) = m.shape();
    let mut q = m.clone();
    for j in 0..cols {
        for _pass in 0..2 {
            for i in 0..j {
                let proj: Complex64 = q.column(i).dotc(&q.column(j));
                let qi = q.column(i).clone_owned();
                let mut cj = q.column_mut(j);
                cj -= qi * proj;
            }
        }
        let norm = q.column(j).norm();
        assert!(norm > 0.0, "qr_unitary: rank-deficient input");
        let mut cj = q.column_mut(j);
        cj /= Complex64::new(norm, 0.0);
    }
    debug_assert_eq!(q.nrows(), rows);
    q
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    qr_unitary(&complex_gaussian(rng, n, n))
}

/// `exp(i·t·H)` for Hermitian `H` via its eigen-decomposition.
pub fn unitary_exp(h: &CMatrix, t: f64) -> CMatrix {
    let eig = hermitian_eigen(h);
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&x| Complex64::from_polar(1.0, t * x))
        .collect();
    unitary_congruence(&eig.vectors, &phases)
}

/// `‖U*U − I‖_F`
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    frobenius(&(u.adjoint() * u - identity(u.ncols())))
}
