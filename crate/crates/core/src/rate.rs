//! The rate functions I^(1), I^(2) and I = min(I^(1), I^(2)).

use serde::Serialize;

use crate::domain::{self, check_direction};
use crate::error::{Error, Result};
use crate::geometry::Vector2;
use crate::points;
use crate::srbm::Srbm;

/// Branch of the geometric case split that produced I^(i)(v). Names refer
/// to index 1; for index 2 the branch is taken in the swapped instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseFired {
    /// θ^(i,max) ∈ ∂Γ_i: sup over the whole ellipse.
    MaxOnFace,
    /// θ̃^(i,r) left of θ^(3−i,max): ⟨v, θ̃^(i,r)⟩.
    TildeLeftOfTop,
    /// v below or on the normal at θ̃^(i,r): ⟨v, θ̃^(i,r)⟩.
    BelowNormal,
    /// v above the normal at θ̃^(i,r): sup over the ellipse.
    AboveNormal,
}

impl CaseFired {
    pub fn label(&self) -> &'static str {
        match self {
            CaseFired::MaxOnFace => "max-on-face",
            CaseFired::TildeLeftOfTop => "tilde-left-of-top",
            CaseFired::BelowNormal => "below-normal",
            CaseFired::AboveNormal => "above-normal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateI {
    pub value: f64,
    pub maximizer: Vector2,
    pub case_fired: CaseFired,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateResult {
    pub value: f64,
    pub i1: f64,
    pub i2: f64,
    /// Maximizer of the smaller of I^(1), I^(2), on the closure of D^(i).
    pub maximizer: Vector2,
    pub case_fired: [CaseFired; 2],
}

/// I^(i)(v).
pub fn rate_i(s: &Srbm, i: usize, v: Vector2) -> Result<RateI> {
    check_direction(v)?;
    if i == 2 {
        let r = rate_i(&s.swapped(), 1, v.swap())?;
        return Ok(RateI {
            maximizer: r.maximizer.swap(),
            ..r
        });
    }
    let ellipse = |case_fired| {
        domain::sup_over_ellipse(s, v).map(|(value, maximizer)| RateI {
            value,
            maximizer,
            case_fired,
        })
    };
    if points::max_on_boundary_face(s, 1) {
        return ellipse(CaseFired::MaxOnFace);
    }
    let tilde = points::theta_r_tilde(s, 1);
    let corner = |case_fired| RateI {
        value: v.dot(tilde),
        maximizer: tilde,
        case_fired,
    };
    if tilde.x1 <= points::theta_max(s, 2).x1 {
        return Ok(corner(CaseFired::TildeLeftOfTop));
    }
    if s.normal(tilde).cross(v) <= 0.0 {
        Ok(corner(CaseFired::BelowNormal))
    } else {
        ellipse(CaseFired::AboveNormal)
    }
}

/// I(v) = min(I^(1)(v), I^(2)(v)), checked against the description through
/// τ: min of ⟨v, θ̃^(i,r)⟩ when τ ∈ Γ, sup of ⟨v, θ⟩ over D otherwise.
pub fn rate(s: &Srbm, v: Vector2) -> Result<RateResult> {
    let r1 = rate_i(s, 1, v)?;
    let r2 = rate_i(s, 2, v)?;
    let best = if r1.value <= r2.value { r1 } else { r2 };
    let result = RateResult {
        value: best.value,
        i1: r1.value,
        i2: r2.value,
        maximizer: best.maximizer,
        case_fired: [r1.case_fired, r2.case_fired],
    };

    let check = via_tau(s, v)?;
    let tol = 1e-9_f64.max(s.tol()) * (1.0 + result.value.abs());
    if (check - result.value).abs() > tol {
        return Err(Error::InconsistentCriteria(format!(
            "I(v) = {} from the case split but {} from the domain D",
            result.value, check
        )));
    }
    Ok(result)
}

fn via_tau(s: &Srbm, v: Vector2) -> Result<f64> {
    let t = domain::tau(s)?;
    if t.tau_in_gamma {
        let a = v.dot(points::theta_r_tilde(s, 1));
        let b = v.dot(points::theta_r_tilde(s, 2));
        Ok(a.min(b))
    } else {
        domain::sup_over_domain(s, v).map(|(value, _)| value)
    }
}
