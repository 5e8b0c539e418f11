#![allow(dead_code)]

use rand::Rng;
use srbm2d::{points, Matrix2, Srbm, SrbmData, Vector2};

/// A random valid instance. μ = −R w with w > 0 makes the stability
/// conditions hold automatically.
pub fn random_instance(rng: &mut impl Rng) -> Srbm {
    loop {
        let (a, b) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
        let rho: f64 = rng.random_range(-0.8..0.8);
        let c = rho * f64::sqrt(a * b);
        let r = Matrix2::new(
            rng.random_range(0.5..2.0),
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
            rng.random_range(0.5..2.0),
        );
        if r.det() < 0.05 {
            continue;
        }
        let w = Vector2::new(rng.random_range(0.2..2.0), rng.random_range(0.2..2.0));
        let data = SrbmData::new(Matrix2::new(a, c, c, b), -(r * w), r);
        if let Ok(s) = data.validated() {
            return s;
        }
    }
}

/// A random direction in the closed quadrant.
pub fn random_direction(rng: &mut impl Rng) -> Vector2 {
    let t: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    Vector2::new(t.cos(), t.sin())
}

pub fn circle(r: Matrix2) -> Srbm {
    SrbmData::new(Matrix2::IDENTITY, Vector2::new(-1.0, -1.0), r)
        .validated()
        .unwrap()
}

pub fn identity() -> Srbm {
    SrbmData::identity().validated().unwrap()
}

pub fn e1() -> Srbm {
    circle(Matrix2::new(1.0, 0.0, 0.5, 1.0))
}

/// sup⟨v, θ⟩ over D^(i), from its definition: D^(i) is the set of points
/// dominated by some θ' ∈ Γ with θ'_i < θ^(i,Γ)_i, so the sup is the max of
/// ⟨v, θ⟩ over ellipse points with θ_i ≤ θ^(i,Γ)_i.
pub fn sampled_sup_d_i(s: &Srbm, i: usize, v: Vector2, n: usize) -> f64 {
    let cap = points::theta_gamma(s, i).get(i);
    points::ellipse_samples(s, n)
        .into_iter()
        .filter(|p| p.get(i) <= cap)
        .chain(std::iter::once(points::theta_gamma(s, i)))
        .chain(chord_ends(s, i, cap))
        .map(|p| v.dot(p))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Points of the ellipse with θ_i = cap, from the quadratic in θ_j.
pub fn chord_ends(s: &Srbm, i: usize, cap: f64) -> Vec<Vector2> {
    let j = 3 - i;
    let sig = s.sigma();
    let (sii, sij, sjj) = (sig.get(i, i), sig.get(i, j), sig.get(j, j));
    let (mi, mj) = (s.mu().get(i), s.mu().get(j));
    let a = -0.5 * sjj;
    let b = -(sij * cap + mj);
    let c = -0.5 * sii * cap * cap - mi * cap;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    [-1.0, 1.0]
        .iter()
        .map(|sgn| {
            let t = (-b + sgn * disc.sqrt()) / (2.0 * a);
            if i == 1 {
                Vector2::new(cap, t)
            } else {
                Vector2::new(t, cap)
            }
        })
        .collect()
}

/// Γ_max membership by brute force: θ ∈ Γ_max iff some grid point of Γ
/// dominates it strictly. With a filter on θ', the same test gives D^(i).
pub struct GammaMaxGrid {
    xs: Vec<f64>,
    /// best[k] = max θ'_2 over grid points of Γ with θ'_1 = xs[j], j ≥ k
    best: Vec<f64>,
}

impl GammaMaxGrid {
    pub fn new(s: &Srbm, lo: f64, hi: f64, n: usize) -> Self {
        Self::filtered(s, lo, hi, n, |_| true)
    }

    pub fn filtered(s: &Srbm, lo: f64, hi: f64, n: usize, keep: impl Fn(Vector2) -> bool) -> Self {
        let step = (hi - lo) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|k| lo + step * k as f64).collect();
        let mut col = vec![f64::NEG_INFINITY; n];
        for (j, &x) in xs.iter().enumerate() {
            for &y in &xs {
                let p = Vector2::new(x, y);
                if s.gamma(p) > 0.0 && keep(p) {
                    col[j] = col[j].max(y);
                }
            }
        }
        let mut best = col.clone();
        for k in (0..n - 1).rev() {
            best[k] = best[k].max(best[k + 1]);
        }
        GammaMaxGrid { xs, best }
    }

    pub fn step(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    pub fn contains(&self, theta: Vector2) -> bool {
        match self.xs.iter().position(|&x| x > theta.x1) {
            Some(k) => theta.x2 < self.best[k],
            None => false,
        }
    }
}

/// Square box containing the ellipse with a margin of 1. The smallest θ_i
/// on the ellipse is the reflection of θ^(i,max)_i through the center.
pub fn ellipse_box(s: &Srbm) -> (f64, f64) {
    let c = s.ellipse_center();
    let (t1, t2) = (points::theta_max(s, 1).x1, points::theta_max(s, 2).x2);
    let lo = (2.0 * c.x1 - t1).min(2.0 * c.x2 - t2) - 1.0;
    let hi = t1.max(t2) + 1.0;
    (lo, hi)
}
