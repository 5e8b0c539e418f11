//! Characteristic points on the ellipse ∂Γ = {γ = 0}.
//!
//! Index conventions follow the rays: `theta_r(i)` is the nonzero point where
//! the ray γ_{3−i} = 0 (direction p^(i)) meets the ellipse, `theta_max(i)`
//! maximizes coordinate `i` on the ellipse, and `theta_r_tilde(i)` is the
//! other ellipse point sharing coordinate `i` with `theta_r(i)`.

use serde::Serialize;

use crate::geometry::Vector2;
use crate::srbm::Srbm;

/// The characteristic points, index 0 holding `i = 1` and index 1 `i = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharPoints {
    pub theta_r: [Vector2; 2],
    pub theta_max: [Vector2; 2],
    pub theta_r_tilde: [Vector2; 2],
    pub theta_gamma: [Vector2; 2],
}

impl CharPoints {
    pub fn compute(s: &Srbm) -> Self {
        let both = |f: fn(&Srbm, usize) -> Vector2| [f(s, 1), f(s, 2)];
        CharPoints {
            theta_r: both(theta_r),
            theta_max: both(theta_max),
            theta_r_tilde: both(theta_r_tilde),
            theta_gamma: both(theta_gamma),
        }
    }

    pub fn r(&self, i: usize) -> Vector2 {
        self.theta_r[i - 1]
    }

    pub fn max(&self, i: usize) -> Vector2 {
        self.theta_max[i - 1]
    }

    pub fn r_tilde(&self, i: usize) -> Vector2 {
        self.theta_r_tilde[i - 1]
    }

    pub fn gamma(&self, i: usize) -> Vector2 {
        self.theta_gamma[i - 1]
    }

    /// All eight points, for invariant checks.
    pub fn all(&self) -> [Vector2; 8] {
        [
            self.theta_r[0],
            self.theta_r[1],
            self.theta_max[0],
            self.theta_max[1],
            self.theta_r_tilde[0],
            self.theta_r_tilde[1],
            self.theta_gamma[0],
            self.theta_gamma[1],
        ]
    }
}

fn other(i: usize) -> usize {
    3 - i
}

/// θ^(i,r) = −2⟨μ, p^(i)⟩ / ⟨p^(i), Σ p^(i)⟩ · p^(i).
pub fn theta_r(s: &Srbm, i: usize) -> Vector2 {
    let p = s.p_vec(i);
    let scale = -2.0 * s.mu().dot(p) / s.sigma().form(p, p);
    scale * p
}

/// The ellipse point with the largest coordinate `i`.
///
/// At the maximizer the normal Σθ + μ is parallel to e^(i). Writing the
/// ellipse as ⟨θ − c, Σ(θ − c)⟩ = ⟨μ, Σ⁻¹μ⟩ around c = −Σ⁻¹μ, this gives
/// θ − c ∝ Σ⁻¹e^(i) with the length fixed by the ellipse equation.
pub fn theta_max(s: &Srbm, i: usize) -> Vector2 {
    let dir = s.sigma_inv() * Vector2::unit(i);
    let scale = (s.mu_sigma_norm2() / dir.get(i)).sqrt();
    s.ellipse_center() + scale * dir
}

/// True when θ^(i,r) and θ^(i,max) coincide at the instance tolerance.
pub fn theta_r_is_max(s: &Srbm, i: usize) -> bool {
    let max = theta_max(s, i);
    theta_r(s, i).distance(max) <= s.snap_scale(max)
}

/// The "symmetry" of θ^(i,r): same coordinate `i`, other root in the
/// remaining coordinate. Collapses to θ^(i,max) when the two coincide.
pub fn theta_r_tilde(s: &Srbm, i: usize) -> Vector2 {
    if theta_r_is_max(s, i) {
        return theta_max(s, i);
    }
    let j = other(i);
    let tr = theta_r(s, i);
    let a = tr.get(i);
    // γ restricted to {θ_i = a} is −½σ_jj t² − (σ_ij a + μ_j) t + const;
    // the two roots sum to −2(σ_ij a + μ_j)/σ_jj.
    let sigma = s.sigma();
    let root_sum = -2.0 * (sigma.get(i, j) * a + s.mu().get(j)) / sigma.get(j, j);
    let t = root_sum - tr.get(j);
    with_components(i, a, t)
}

/// Build a vector with coordinate `i` equal to `along` and the other equal to `across`.
pub(crate) fn with_components(i: usize, along: f64, across: f64) -> Vector2 {
    if i == 1 {
        Vector2::new(along, across)
    } else {
        Vector2::new(across, along)
    }
}

/// Whether θ^(i,max) lies on ∂Γ_i, decided by γ_{3−i}(θ^(i,max)) ≤ 0. Ties
/// within tolerance, including θ^(i,r) = θ^(i,max), count as membership.
pub fn max_on_boundary_face(s: &Srbm, i: usize) -> bool {
    if theta_r_is_max(s, i) {
        return true;
    }
    let max = theta_max(s, i);
    let j = other(i);
    let g = s.gamma_i(j, max);
    g <= s.snap_scale(max) * s.r().column(j).norm()
}

/// θ^(i,Γ): θ^(i,max) if it lies on ∂Γ_i, θ^(i,r) otherwise.
pub fn theta_gamma(s: &Srbm, i: usize) -> Vector2 {
    if max_on_boundary_face(s, i) {
        theta_max(s, i)
    } else {
        theta_r(s, i)
    }
}

/// `n` points on the ellipse, counter-clockwise, starting on the horizontal
/// ray to the right of the centre.
pub fn ellipse_samples(s: &Srbm, n: usize) -> Vec<Vector2> {
    let center = s.ellipse_center();
    let radius2 = s.mu_sigma_norm2();
    let (l1, l2, u) = s.sigma().symmetric_eigen();
    let w = Vector2::new(-u.x2, u.x1);
    // θ = c + √m (cos t / √λ1 · u + sin t / √λ2 · w)
    let a1 = (radius2 / l1).sqrt();
    let a2 = (radius2 / l2).sqrt();
    // Parameter of the point due right of the centre.
    let t0 = (l2.sqrt() * w.x1).atan2(l1.sqrt() * u.x1);
    (0..n)
        .map(|k| {
            let t = t0 + std::f64::consts::TAU * k as f64 / n as f64;
            center + (a1 * t.cos()) * u + (a2 * t.sin()) * w
        })
        .collect()
}
