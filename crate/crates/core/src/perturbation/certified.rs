use crate::bandlimited::{lp_decomposition, sup_norm_default, CutoffWindow, TrigPolynomial};
use crate::error::{Error, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Certified sup-norm uppers `uₙ ≥ ‖fₙ‖∞` of the Littlewood–Paley pieces.
///
/// Each piece has spectrum in the disc of radius `2^{n+1}`, so both of its
/// divided-difference kernels have multiplier norm at most
/// `√3·2^{n+1}·uₙ`, and `‖fₙ(N₁) − fₙ(N₂)‖ ≤ 2√3·2^{n+1}·uₙ·‖N₁ − N₂‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceBounds {
    pieces: Vec<(i32, f64)>,
}

impl PieceBounds {
    pub fn new(f: &TrigPolynomial, win: &CutoffWindow) -> Result<Self> {
        let mut pieces = Vec::new();
        for (n, piece) in lp_decomposition(f, win) {
            pieces.push((n, sup_norm_default(&piece)?.upper));
        }
        Ok(Self { pieces })
    }

    /// `(n, uₙ)` in increasing `n`.
    pub fn pieces(&self) -> &[(i32, f64)] {
        &self.pieces
    }

    fn head_term(n: i32, u: f64) -> f64 {
        2.0 * SQRT3 * 2f64.powi(n + 1) * u
    }

    /// `L(f) = 2√3·Σₙ 2^{n+1}·uₙ`.
    pub fn lipschitz(&self) -> f64 {
        self.pieces.iter().map(|&(n, u)| Self::head_term(n, u)).sum()
    }

    /// `min over m of δ·Σ_{n≤m} 2√3·2^{n+1}·uₙ + 2·Σ_{n>m} uₙ`, the split
    /// below every piece included.
    pub fn modulus(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0) {
            return Err(Error::invalid(format!("δ must be positive, got {delta}")));
        }
        let mut tail: f64 = 2.0 * self.pieces.iter().map(|p| p.1).sum::<f64>();
        let mut head = 0.0;
        let mut best = tail;
        for &(n, u) in &self.pieces {
            head += Self::head_term(n, u);
            tail -= 2.0 * u;
            best = best.min(delta * head + tail.max(0.0));
        }
        Ok(best)
    }
}

/// Certified operator Lipschitz constant from the dyadic pieces.
pub fn certified_lipschitz_constant(f: &TrigPolynomial, win: &CutoffWindow) -> Result<f64> {
    Ok(PieceBounds::new(f, win)?.lipschitz())
}

/// Certified upper bound on `‖f(N₁) − f(N₂)‖` whenever `‖N₁ − N₂‖ ≤ δ`.
pub fn certified_modulus_bound(f: &TrigPolynomial, delta: f64, win: &CutoffWindow) -> Result<f64> {
    PieceBounds::new(f, win)?.modulus(delta)
}
