/// Smooth dyadic cutoff pair `(w, v)`.
///
/// `w` is built from the transition `θ(t) = 1/(1 + exp(1/t − 1/(1−t)))`:
/// `w(x) = θ(2x − 1)` on `[1/2, 1]`, `w(x) = θ(2 − x)` on `[1, 2]`, zero
/// elsewhere. The symmetry `θ(1−t) = 1 − θ(t)` gives `w(x) = 1 − w(x/2)` on
/// `[1, 2]`. `v = 1` on `[−1, 1]` and `v(x) = w(|x|)` beyond.
///
/// The window is a library constant; it is never serialized.
#[derive(Clone, Copy, Debug)]
pub struct CutoffWindow {
    pub w: fn(f64) -> f64,
    pub v: fn(f64) -> f64,
}

impl Default for CutoffWindow {
    fn default() -> Self {
        Self::standard()
    }
}

fn theta(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / t - 1.0 / (1.0 - t)).exp())
    }
}

fn standard_w(x: f64) -> f64 {
    if !(0.5..=2.0).contains(&x) {
        0.0
    } else if x <= 1.0 {
        theta(2.0 * x - 1.0)
    } else {
        theta(2.0 - x)
    }
}

fn standard_v(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        1.0
    } else {
        standard_w(a)
    }
}

impl CutoffWindow {
    pub fn standard() -> Self {
        Self {
            w: standard_w,
            v: standard_v,
        }
    }

    pub fn w(&self, x: f64) -> f64 {
        (self.w)(x)
    }

    pub fn v(&self, x: f64) -> f64 {
        (self.v)(x)
    }

    /// Sampled check of the window axioms; returns the worst violation.
    pub fn axiom_defect(&self, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            let x = 1.0 + i as f64 / (samples.max(2) - 1) as f64;
            worst = worst.max((self.w(x) - (1.0 - self.w(x / 2.0))).abs());
            let outside = [0.5 * x - 0.5 - 1e-9, 2.0 + x];
            for o in outside {
                worst = worst.max(self.w(o).abs());
            }
            let y = 0.25 + 8.0 * i as f64 / samples.max(1) as f64;
            let partition: f64 = (-6..=6).map(|n| self.w(y / 2f64.powi(n))).sum();
            worst = worst.max((partition - 1.0).abs());
            if self.w(y) < 0.0 {
                worst = worst.max(-self.w(y));
            }
        }
        worst
    }
}
