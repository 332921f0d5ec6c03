use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Compact convex subset of the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConvexBody {
    /// Vertices in counterclockwise order.
    Polygon { vertices: Vec<[f64; 2]> },
    Disc { center: [f64; 2], radius: f64 },
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl ConvexBody {
    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::invalid("a polygon needs at least three vertices"));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("polygon vertices must be finite"));
        }
        for i in 0..n {
            if cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) < 0.0 {
                return Err(Error::invalid("polygon must be convex with counterclockwise vertices"));
            }
        }
        Ok(ConvexBody::Polygon { vertices })
    }

    pub fn disc(center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) || !center.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("disc needs a finite center and nonnegative radius"));
        }
        Ok(ConvexBody::Disc { center, radius })
    }

    /// Counterclockwise rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Self::polygon(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ConvexBody::Disc { radius, .. } => 2.0 * radius,
            ConvexBody::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for (i, a) in vertices.iter().enumerate() {
                    for b in &vertices[i + 1..] {
                        d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
                    }
                }
                d
            }
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            ConvexBody::Disc { center, radius } => (z.re - center[0]).hypot(z.im - center[1]) <= *radius,
            ConvexBody::Polygon { vertices } => {
                let p = [z.re, z.im];
                let n = vertices.len();
                (0..n).all(|i| cross(vertices[i], vertices[(i + 1) % n], p) >= 0.0)
            }
        }
    }
}

fn project_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return a;
    }
    let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0);
    [a[0] + t * dx, a[1] + t * dy]
}

/// Nearest point of `k` to `z`.
pub fn project_convex(z: Complex64, k: &ConvexBody) -> Complex64 {
    if k.contains(z) {
        return z;
    }
    match k {
        ConvexBody::Disc { center, radius } => {
            let c = Complex64::new(center[0], center[1]);
            let d = z - c;
            c + d * (radius / d.norm())
        }
        ConvexBody::Polygon { vertices } => {
            let p = [z.re, z.im];
            let n = vertices.len();
            let mut best = vertices[0];
            let mut best_d = f64::INFINITY;
            for i in 0..n {
                let q = project_segment(p, vertices[i], vertices[(i + 1) % n]);
                let d = (q[0] - p[0]).hypot(q[1] - p[1]);
                if d < best_d {
                    best_d = d;
                    best = q;
                }
            }
            Complex64::new(best[0], best[1])
        }
    }
}

/// `ζ ↦ f(ζ♯)` with `ζ♯` the nearest point of `k`.
pub fn extend_by_projection<F>(f: F, k: ConvexBody) -> impl Fn(Complex64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    move |z| f(project_convex(z, &k))
}
