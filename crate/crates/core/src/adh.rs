//! Exit velocities, reflective faces and the product-form characterization.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Matrix2, Vector2};
use crate::points;
use crate::srbm::Srbm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExitVelocities {
    /// a^1, a^2
    pub a: [Vector2; 2],
    /// ã^1, ã^2
    pub a_tilde: [Vector2; 2],
    /// (e^i, n^i) for the faces F_1 and F_2.
    pub e_basis: [(Vector2, Vector2); 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductFormResult {
    pub is_product_form: bool,
    pub alpha: Option<Vector2>,
    pub skew_symmetric: bool,
    pub geometric: bool,
}

/// Which boundary face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Face {
    F1,
    F2,
}

impl Face {
    pub fn index(&self) -> usize {
        match self {
            Face::F1 => 1,
            Face::F2 => 2,
        }
    }
}

/// Basis (e^i, n^i) of face F_i: e^i runs along the face, n^i is its normal.
pub fn face_basis(i: usize) -> (Vector2, Vector2) {
    match i {
        1 => (Vector2::E2, Vector2::E1),
        2 => (Vector2::E1, Vector2::E2),
        _ => panic!("face index must be 1 or 2, got {i}"),
    }
}

/// a^i = n^Γ(θ^(3−i,r)).
pub fn exit_velocity(s: &Srbm, i: usize) -> Vector2 {
    s.normal(points::theta_r(s, 3 - i))
}

/// ã^i: the component of a^i along e^i kept, the Σ⁻¹-orthogonal component
/// along Σn^i reflected.
pub fn exit_velocity_tilde(s: &Srbm, i: usize) -> Vector2 {
    let a = exit_velocity(s, i);
    let (e, n) = face_basis(i);
    let sig = s.sigma();
    let sinv = s.sigma_inv();
    let along = sinv.form(a, e) / sinv.form(e, e);
    let across = a.dot(n) / sig.form(n, n);
    along * e - across * (sig * n)
}

pub fn exit_velocities(s: &Srbm) -> ExitVelocities {
    ExitVelocities {
        a: [exit_velocity(s, 1), exit_velocity(s, 2)],
        a_tilde: [exit_velocity_tilde(s, 1), exit_velocity_tilde(s, 2)],
        e_basis: [face_basis(1), face_basis(2)],
    }
}

/// Face F_i is reflective iff the i-th component of ã^i is positive. This is
/// checked against the equivalent condition θ^(3−i,max) ∉ ∂Γ_(3−i).
pub fn is_reflective(s: &Srbm, face: Face) -> Result<bool> {
    let i = face.index();
    let at = exit_velocity_tilde(s, i);
    let component = at.get(i);
    let scale = 1.0 + at.norm();
    let by_velocity = component > s.tol() * scale;
    let by_geometry = !points::max_on_boundary_face(s, 3 - i);
    // Both tests sit on the same knife edge when θ^(3−i,r) ≈ θ^(3−i,max);
    // only a disagreement away from it is a real inconsistency.
    if by_velocity != by_geometry && component.abs() > 1e-6 * scale {
        return Err(Error::InconsistentCriteria(format!(
            "face F{i}: ã component {component} disagrees with the position of θ^({},max)",
            3 - i
        )));
    }
    Ok(by_geometry)
}

/// R Δ_R⁻¹ Δ_Σ + Δ_Σ Δ_R⁻¹ Rᵀ
fn skew_rhs(sigma: Matrix2, r: Matrix2) -> Matrix2 {
    let d = Matrix2::diag(sigma.a11 / r.a11, sigma.a22 / r.a22);
    r * d + d * r.transpose()
}

pub fn skew_symmetric(s: &Srbm) -> bool {
    let lhs = 2.0 * s.sigma();
    let gap = (lhs - skew_rhs(s.sigma(), s.r())).max_abs();
    gap <= s.tol() * lhs.max_abs()
}

/// The value of r21 that makes (Σ, R) skew symmetric given the other three
/// entries of R. The diagonal of the condition holds for every R, so only
/// the off-diagonal equation 2σ12 = r12 σ22/r22 + r21 σ11/r11 remains.
pub fn skew_symmetric_r21(sigma: Matrix2, r11: f64, r12: f64, r22: f64) -> f64 {
    (2.0 * sigma.a12 - r12 * sigma.a22 / r22) * r11 / sigma.a11
}

/// α = −2 Δ_Σ⁻¹ Δ_R R⁻¹ μ.
pub fn alpha(s: &Srbm) -> Vector2 {
    let sig = s.sigma();
    let r = s.r();
    let w = r.inverse() * s.mu();
    Vector2::new(
        -2.0 * r.a11 / sig.a11 * w.x1,
        -2.0 * r.a22 / sig.a22 * w.x2,
    )
}

pub fn product_form(s: &Srbm) -> Result<ProductFormResult> {
    let t1 = points::theta_r_tilde(s, 1);
    let t2 = points::theta_r_tilde(s, 2);
    let geometric = t1.distance(t2) <= s.tol() * (1.0 + t1.norm());
    let skew = skew_symmetric(s);
    if geometric != skew {
        return Err(Error::InconsistentCriteria(format!(
            "skew symmetry says {skew}, coincidence of θ̃^(1,r) and θ̃^(2,r) says {geometric}"
        )));
    }
    let alpha = if geometric {
        let a = alpha(s);
        if a.distance(t1) > 1e-9_f64.max(s.tol()) * (1.0 + t1.norm()) {
            return Err(Error::InconsistentCriteria(format!(
                "α = ({}, {}) differs from θ̃^(1,r) = ({}, {})",
                a.x1, a.x2, t1.x1, t1.x2
            )));
        }
        Some(a)
    } else {
        None
    };
    Ok(ProductFormResult {
        is_product_form: geometric,
        alpha,
        skew_symmetric: skew,
        geometric,
    })
}

/// Product-form stationary density α1 α2 exp(−α1 x1 − α2 x2).
pub fn pf_density(alpha: Vector2, x: Vector2) -> Result<f64> {
    if x.x1 < 0.0 || x.x2 < 0.0 {
        return Err(Error::OutOfSupport(x.x1.min(x.x2)));
    }
    Ok(alpha.x1 * alpha.x2 * (-alpha.dot(x)).exp())
}

/// Density of the boundary measure ν_i on its face at distance `at` from
/// the origin.
pub fn pf_boundary_density(s: &Srbm, alpha: Vector2, i: usize, at: f64) -> Result<f64> {
    if at < 0.0 {
        return Err(Error::OutOfSupport(at));
    }
    let c = boundary_constant(s, alpha, i);
    let decay = alpha.get(3 - i);
    Ok(c * (-decay * at).exp())
}

/// Σ_ii α1 α2 / (2 r_ii)
fn boundary_constant(s: &Srbm, alpha: Vector2, i: usize) -> f64 {
    s.sigma().get(i, i) * alpha.x1 * alpha.x2 / (2.0 * s.r().get(i, i))
}

/// Moment generating functions (φ, φ1, φ2) of the product-form stationary
/// distribution and boundary measures at θ < α.
pub fn pf_mgfs(s: &Srbm, alpha: Vector2, theta: Vector2) -> Result<(f64, f64, f64)> {
    if !theta.lt(alpha) {
        return Err(Error::DomainError(format!(
            "θ = ({}, {}) is not below α = ({}, {})",
            theta.x1, theta.x2, alpha.x1, alpha.x2
        )));
    }
    let g1 = alpha.x1 - theta.x1;
    let g2 = alpha.x2 - theta.x2;
    let phi = alpha.x1 * alpha.x2 / (g1 * g2);
    let phi1 = boundary_constant(s, alpha, 1) / g2;
    let phi2 = boundary_constant(s, alpha, 2) / g1;
    Ok((phi, phi1, phi2))
}

/// γ(θ)φ(θ) − γ1(θ)φ1(θ2) − γ2(θ)φ2(θ1).
pub fn bar_residual(s: &Srbm, alpha: Vector2, theta: Vector2) -> Result<f64> {
    let (phi, phi1, phi2) = pf_mgfs(s, alpha, theta)?;
    Ok(s.gamma(theta) * phi - s.gamma_i(1, theta) * phi1 - s.gamma_i(2, theta) * phi2)
}

/// Largest |BAR residual| over an n×n grid spanning [−α, 0.95α).
pub fn max_bar_residual(s: &Srbm, alpha: Vector2, n: usize) -> Result<f64> {
    let node = |a: f64, k: usize| a * (-1.0 + 1.95 * k as f64 / (n.max(2) - 1) as f64);
    let mut worst = 0.0_f64;
    for j in 0..n {
        for k in 0..n {
            let theta = Vector2::new(node(alpha.x1, j), node(alpha.x2, k));
            worst = worst.max(bar_residual(s, alpha, theta)?.abs());
        }
    }
    Ok(worst)
}
