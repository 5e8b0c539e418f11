//! Categories, the domains Γ_max, D^(1), D^(2), D = D^(1) ∩ D^(2), the cap τ
//! and the support functions of these sets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{quadratic_roots, Vector2};
use crate::points::{self, CharPoints};
use crate::srbm::Srbm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Category {
    CatI,
    CatII,
    CatIII,
}

impl Category {
    pub fn label(&self) -> &'static str {
        match self {
            Category::CatI => "I",
            Category::CatII => "II",
            Category::CatIII => "III",
        }
    }

    /// The category of the coordinate-swapped instance.
    pub fn swapped(&self) -> Category {
        match self {
            Category::CatI => Category::CatI,
            Category::CatII => Category::CatIII,
            Category::CatIII => Category::CatII,
        }
    }
}

/// Shape of D^(i).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DomainCase {
    /// {θ < θ̃^(i,r)}
    BoxBelowTilde,
    /// Γ_max ∩ {θ_i < θ̃^(i,r)_i}
    GammaMaxCappedAtTilde,
    /// Γ_max
    GammaMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tau {
    pub tau: Vector2,
    pub tau_in_gamma: bool,
}

fn strictly_less(s: &Srbm, a: f64, b: f64) -> bool {
    a < b && !s.approx_eq(a, b)
}

fn less_or_equal(s: &Srbm, a: f64, b: f64) -> bool {
    a <= b || s.approx_eq(a, b)
}

/// Category from the componentwise order of θ^(1,Γ) and θ^(2,Γ). Comparisons
/// snap at the instance tolerance; a tie θ^(1,Γ) = θ^(2,Γ) reports CatII.
pub fn category(s: &Srbm) -> Result<Category> {
    let cp = CharPoints::compute(s);
    category_from_points(s, &cp)
}

pub(crate) fn category_from_points(s: &Srbm, cp: &CharPoints) -> Result<Category> {
    let (g1, g2) = (cp.gamma(1), cp.gamma(2));
    if strictly_less(s, g2.x1, g1.x1) && strictly_less(s, g1.x2, g2.x2) {
        Ok(Category::CatI)
    } else if less_or_equal(s, g2.x1, g1.x1) && less_or_equal(s, g2.x2, g1.x2) {
        Ok(Category::CatII)
    } else if less_or_equal(s, g1.x1, g2.x1) && less_or_equal(s, g1.x2, g2.x2) {
        Ok(Category::CatIII)
    } else {
        Err(Error::Unclassifiable)
    }
}

/// Whether γ(θ) > 0, with values within roundoff of zero counted as on the
/// ellipse (hence outside the open set Γ).
pub fn in_gamma(s: &Srbm, theta: Vector2) -> bool {
    let scale = 1.0 + 0.5 * s.sigma().form(theta, theta).abs() + s.mu().dot(theta).abs();
    s.gamma(theta) > s.tol() * scale
}

pub fn tau(s: &Srbm) -> Result<Tau> {
    let cp = CharPoints::compute(s);
    tau_from_points(s, &cp)
}

pub(crate) fn tau_from_points(s: &Srbm, cp: &CharPoints) -> Result<Tau> {
    let t = match category_from_points(s, cp)? {
        Category::CatI => Vector2::new(cp.gamma(1).x1, cp.gamma(2).x2),
        Category::CatII => cp.r_tilde(2),
        Category::CatIII => cp.r_tilde(1),
    };
    Ok(Tau {
        tau: t,
        tau_in_gamma: in_gamma(s, t),
    })
}

/// Upper boundary of Γ_max as a function of θ_1: the supremum of θ'_2 over
/// θ' ∈ Γ with θ'_1 > x. Returns −∞ beyond θ^(1,max)_1.
pub fn gamma_max_upper(s: &Srbm, x: f64) -> f64 {
    upper_between(s, points::theta_max(s, 2), points::theta_max(s, 1), x)
}

fn upper_between(s: &Srbm, top: Vector2, right: Vector2, x: f64) -> f64 {
    if x <= top.x1 {
        return top.x2;
    }
    if x >= right.x1 {
        return if s.approx_eq(x, right.x1) {
            right.x2
        } else {
            f64::NEG_INFINITY
        };
    }
    upper_root(s, x).unwrap_or(right.x2)
}

/// Larger root t of γ(x, t) = 0.
fn upper_root(s: &Srbm, x: f64) -> Option<f64> {
    let sig = s.sigma();
    let mu = s.mu();
    // −2γ(x, t) = σ22 t² + 2(σ12 x + μ2) t + σ11 x² + 2 μ1 x
    quadratic_roots(
        sig.a22,
        2.0 * (sig.a12 * x + mu.x2),
        sig.a11 * x * x + 2.0 * mu.x1 * x,
    )
    .map(|(_, hi)| hi)
}

/// θ ∈ Γ_max, i.e. θ < θ' for some θ' ∈ Γ.
pub fn in_gamma_max(s: &Srbm, theta: Vector2) -> bool {
    theta.x1 < points::theta_max(s, 1).x1 && theta.x2 < gamma_max_upper(s, theta.x1)
}

/// Which of the three shapes D^(i) takes.
pub fn domain_case(s: &Srbm, i: usize) -> DomainCase {
    if i == 2 {
        return domain_case(&s.swapped(), 1);
    }
    if points::max_on_boundary_face(s, 1) {
        DomainCase::GammaMax
    } else if points::theta_r(s, 1).x1 <= points::theta_max(s, 2).x1 {
        DomainCase::BoxBelowTilde
    } else {
        DomainCase::GammaMaxCappedAtTilde
    }
}

pub fn in_domain_d_i(s: &Srbm, i: usize, theta: Vector2) -> bool {
    if i == 2 {
        return in_domain_d_i(&s.swapped(), 1, theta.swap());
    }
    let tilde = points::theta_r_tilde(s, 1);
    match domain_case(s, 1) {
        DomainCase::BoxBelowTilde => theta.lt(tilde),
        DomainCase::GammaMaxCappedAtTilde => in_gamma_max(s, theta) && theta.x1 < tilde.x1,
        DomainCase::GammaMax => in_gamma_max(s, theta),
    }
}

/// θ ∈ D = {θ ∈ Γ_max; θ < τ}.
pub fn in_domain_d(s: &Srbm, theta: Vector2) -> Result<bool> {
    let t = tau(s)?;
    Ok(in_gamma_max(s, theta) && theta.lt(t.tau))
}

/// Membership tests for Γ_max, D^(1), D^(2) and D with the characteristic
/// points computed once, for scanning many points of one instance.
#[derive(Debug, Clone)]
pub struct Domains {
    s: Srbm,
    swapped: Srbm,
    cp: CharPoints,
    cases: [DomainCase; 2],
    tau: Tau,
}

impl Domains {
    pub fn new(s: &Srbm) -> Result<Self> {
        let cp = CharPoints::compute(s);
        let tau = tau_from_points(s, &cp)?;
        Ok(Domains {
            s: *s,
            swapped: s.swapped(),
            cp,
            cases: [domain_case(s, 1), domain_case(s, 2)],
            tau,
        })
    }

    pub fn points(&self) -> &CharPoints {
        &self.cp
    }

    pub fn tau(&self) -> Tau {
        self.tau
    }

    pub fn case(&self, i: usize) -> DomainCase {
        self.cases[i - 1]
    }

    pub fn in_gamma_max(&self, theta: Vector2) -> bool {
        let (top, right) = (self.cp.max(2), self.cp.max(1));
        theta.x1 < right.x1 && theta.x2 < upper_between(&self.s, top, right, theta.x1)
    }

    /// The mirror of `in_gamma_max` with the roles of the axes exchanged;
    /// the same set, tested through the other coordinate.
    fn in_gamma_max_swapped(&self, theta: Vector2) -> bool {
        let (top, right) = (self.cp.max(1).swap(), self.cp.max(2).swap());
        let t = theta.swap();
        t.x1 < right.x1 && t.x2 < upper_between(&self.swapped, top, right, t.x1)
    }

    pub fn in_d_i(&self, i: usize, theta: Vector2) -> bool {
        let tilde = self.cp.r_tilde(i);
        match self.case(i) {
            DomainCase::BoxBelowTilde => theta.lt(tilde),
            DomainCase::GammaMaxCappedAtTilde => {
                let below_cap = theta.get(i) < tilde.get(i);
                below_cap
                    && if i == 1 {
                        self.in_gamma_max(theta)
                    } else {
                        self.in_gamma_max_swapped(theta)
                    }
            }
            DomainCase::GammaMax => {
                if i == 1 {
                    self.in_gamma_max(theta)
                } else {
                    self.in_gamma_max_swapped(theta)
                }
            }
        }
    }

    pub fn in_d(&self, theta: Vector2) -> bool {
        self.in_gamma_max(theta) && theta.lt(self.tau.tau)
    }
}

pub(crate) fn check_direction(v: Vector2) -> Result<()> {
    if !v.is_finite() || v.x1 < 0.0 || v.x2 < 0.0 {
        return Err(Error::NegativeDirection(v.x1, v.x2));
    }
    if v.x1 == 0.0 && v.x2 == 0.0 {
        return Err(Error::ZeroDirection);
    }
    Ok(())
}

/// sup{⟨v, θ⟩; θ ∈ Γ} and the ellipse point attaining it, where the normal
/// is parallel to `v`.
pub fn sup_over_ellipse(s: &Srbm, v: Vector2) -> Result<(f64, Vector2)> {
    if v.x1 == 0.0 && v.x2 == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let sinv = s.sigma_inv();
    let mu = s.mu();
    let m = s.mu_sigma_norm2();
    let vv = sinv.form(v, v);
    let alpha = (m / vv).sqrt();
    let argmax = sinv * (alpha * v - mu);
    let value = (m * vv).sqrt() - sinv.form(mu, v);
    Ok((value, argmax))
}

/// sup{⟨v, θ⟩; θ ∈ Γ_max, θ < cap} for v in the nonnegative quadrant, with
/// the closure point attaining it. Components of `cap` may be +∞.
pub fn sup_over_capped_gamma_max(s: &Srbm, v: Vector2, cap: Vector2) -> Result<(f64, Vector2)> {
    check_direction(v)?;
    let right = points::theta_max(s, 1);
    let top = points::theta_max(s, 2);

    let x_end = cap.x1.min(right.x1);
    let p1 = Vector2::new(x_end, cap.x2.min(gamma_max_upper(s, x_end)));
    let y_end = cap.x2.min(top.x2);
    let p2 = Vector2::new(cap.x1.min(gamma_max_upper(&s.swapped(), y_end)), y_end);

    let mut best = (v.dot(p1), p1);
    if v.dot(p2) > best.0 {
        best = (v.dot(p2), p2);
    }
    let (tangent_value, tangent) = sup_over_ellipse(s, v)?;
    let slack = s.snap_scale(tangent);
    if tangent.x1 <= cap.x1 + slack && tangent.x2 <= cap.x2 + slack && tangent_value > best.0 {
        best = (tangent_value, tangent);
    }
    Ok(best)
}

/// sup{⟨v, θ⟩; θ ∈ D^(i)} from the shape of D^(i).
pub fn sup_over_domain_i(s: &Srbm, i: usize, v: Vector2) -> Result<(f64, Vector2)> {
    if i == 2 {
        let (value, at) = sup_over_domain_i(&s.swapped(), 1, v.swap())?;
        return Ok((value, at.swap()));
    }
    let tilde = points::theta_r_tilde(s, 1);
    let cap = match domain_case(s, 1) {
        DomainCase::BoxBelowTilde => tilde,
        DomainCase::GammaMaxCappedAtTilde => Vector2::new(tilde.x1, f64::INFINITY),
        DomainCase::GammaMax => Vector2::new(f64::INFINITY, f64::INFINITY),
    };
    sup_over_capped_gamma_max(s, v, cap)
}

/// sup{⟨v, θ⟩; θ ∈ D}.
pub fn sup_over_domain(s: &Srbm, v: Vector2) -> Result<(f64, Vector2)> {
    let t = tau(s)?;
    sup_over_capped_gamma_max(s, v, t.tau)
}
