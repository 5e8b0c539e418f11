//! SRBM data `(Σ, μ, R)`, its validation, and the scalar functions
//! γ, γ_i and the ellipse normal that everything else is built on.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Matrix2, Vector2};

/// Default relative tolerance for every equality-snapping decision.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Allowed relative asymmetry of Σ before it counts as a failure.
const SYMMETRY_TOL: f64 = 1e-12;

/// Raw, unvalidated SRBM data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrbmData {
    pub sigma: Matrix2,
    pub mu: Vector2,
    pub r: Matrix2,
}

/// A condition an instance can violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    SigmaNotSymmetric,
    SigmaNotPD,
    NotPMatrix,
    NotStable1,
    NotStable2,
}

impl Condition {
    pub fn name(&self) -> &'static str {
        match self {
            Condition::SigmaNotSymmetric => "SigmaNotSymmetric",
            Condition::SigmaNotPD => "SigmaNotPD",
            Condition::NotPMatrix => "NotPMatrix",
            Condition::NotStable1 => "NotStable1",
            Condition::NotStable2 => "NotStable2",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub failures: Vec<Condition>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        let names: Vec<_> = self.failures.iter().map(Condition::name).collect();
        write!(f, "failed {}", names.join(", "))
    }
}

impl SrbmData {
    pub fn new(sigma: Matrix2, mu: Vector2, r: Matrix2) -> Self {
        SrbmData { sigma, mu, r }
    }

    /// Σ = I, μ = (−1, −1), R = I.
    pub fn identity() -> Self {
        SrbmData::new(Matrix2::IDENTITY, Vector2::new(-1.0, -1.0), Matrix2::IDENTITY)
    }

    fn sigma_symmetric_enough(&self) -> bool {
        let (s12, s21) = (self.sigma.a12, self.sigma.a21);
        (s12 - s21).abs() <= SYMMETRY_TOL * s12.abs().max(s21.abs()).max(1.0)
    }

    fn symmetrized_sigma(&self) -> Matrix2 {
        let off = 0.5 * (self.sigma.a12 + self.sigma.a21);
        Matrix2::new(self.sigma.a11, off, off, self.sigma.a22)
    }

    /// Check every existence and stability condition and report all
    /// violations. Inequalities are strict and compared against zero.
    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        if !self.sigma_symmetric_enough() {
            failures.push(Condition::SigmaNotSymmetric);
        }
        let s = self.symmetrized_sigma();
        if !(s.a11 > 0.0 && s.det() > 0.0) {
            failures.push(Condition::SigmaNotPD);
        }
        let r = &self.r;
        if !(r.a11 > 0.0 && r.a22 > 0.0 && r.det() > 0.0) {
            failures.push(Condition::NotPMatrix);
        }
        let mu = self.mu;
        if !(r.a22 * mu.x1 - r.a12 * mu.x2 < 0.0) {
            failures.push(Condition::NotStable1);
        }
        if !(r.a11 * mu.x2 - r.a21 * mu.x1 < 0.0) {
            failures.push(Condition::NotStable2);
        }
        ValidationReport {
            ok: failures.is_empty(),
            failures,
        }
    }

    /// Validate and wrap into an [`Srbm`] with the default tolerance.
    pub fn validated(self) -> Result<Srbm> {
        Srbm::new(self)
    }
}

/// Validated SRBM data. Σ has been symmetrized and its inverse cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Srbm {
    sigma: Matrix2,
    sigma_inv: Matrix2,
    mu: Vector2,
    r: Matrix2,
    tol: f64,
}

impl Srbm {
    pub fn new(data: SrbmData) -> Result<Self> {
        let report = data.validate();
        if !report.ok {
            return Err(Error::InvalidInstance(report));
        }
        let sigma = data.symmetrized_sigma();
        Ok(Srbm {
            sigma,
            sigma_inv: sigma.inverse(),
            mu: data.mu,
            r: data.r,
            tol: DEFAULT_TOL,
        })
    }

    /// Same instance with a different snapping tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn sigma(&self) -> Matrix2 {
        self.sigma
    }

    pub fn sigma_inv(&self) -> Matrix2 {
        self.sigma_inv
    }

    pub fn mu(&self) -> Vector2 {
        self.mu
    }

    pub fn r(&self) -> Matrix2 {
        self.r
    }

    pub fn data(&self) -> SrbmData {
        SrbmData::new(self.sigma, self.mu, self.r)
    }

    /// The instance with coordinates 1 and 2 exchanged. Every object of the
    /// swapped instance is the coordinate swap of the corresponding object
    /// with the other index here.
    pub fn swapped(&self) -> Srbm {
        Srbm {
            sigma: self.sigma.swap(),
            sigma_inv: self.sigma_inv.swap(),
            mu: self.mu.swap(),
            r: self.r.swap(),
            tol: self.tol,
        }
    }

    /// γ(θ) = −½⟨θ, Σθ⟩ − ⟨μ, θ⟩.
    pub fn gamma(&self, theta: Vector2) -> f64 {
        -0.5 * self.sigma.form(theta, theta) - self.mu.dot(theta)
    }

    /// γ_i(θ) = ⟨R^i, θ⟩ with R^i the i-th column of R.
    pub fn gamma_i(&self, i: usize, theta: Vector2) -> f64 {
        self.r.column(i).dot(theta)
    }

    /// p^(1) = (r22, −r12), p^(2) = (−r21, r11); p^(i) ⟂ R^(3−i).
    pub fn p_vec(&self, i: usize) -> Vector2 {
        let r = &self.r;
        match i {
            1 => Vector2::new(r.a22, -r.a12),
            2 => Vector2::new(-r.a21, r.a11),
            _ => panic!("index must be 1 or 2, got {i}"),
        }
    }

    /// Outward normal Σθ + μ of the ellipse γ = 0 (i.e. −∇γ).
    pub fn normal(&self, theta: Vector2) -> Vector2 {
        self.sigma * theta + self.mu
    }

    /// Centre −Σ⁻¹μ of the ellipse.
    pub fn ellipse_center(&self) -> Vector2 {
        -(self.sigma_inv * self.mu)
    }

    /// ⟨μ, Σ⁻¹μ⟩; the ellipse is ⟨θ − c, Σ(θ − c)⟩ = this value.
    pub fn mu_sigma_norm2(&self) -> f64 {
        self.sigma_inv.form(self.mu, self.mu)
    }

    /// `a ≈ b` at the instance tolerance, relative to the larger magnitude.
    pub(crate) fn approx_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.tol * (1.0 + a.abs().max(b.abs()))
    }

    /// Scale used to snap quantities of the size of θ-points.
    pub(crate) fn snap_scale(&self, theta: Vector2) -> f64 {
        self.tol * (1.0 + theta.norm())
    }
}
