//! Exact tail asymptotics of the boundary measures and a numerical kit for
//! checking tail equivalences on closed-form examples.

mod kit;

pub use kit::{
    fit_asymptote, synthesize, tail_operator, verify_inversion_fractional,
    verify_inversion_k_pole, verify_tail_equivalence, AsymptoteFit, TailSamples, VerifyReport,
    VerifyStatus,
};

use serde::Serialize;

use crate::domain::{self, Category};
use crate::error::{Error, Result};
use crate::points::{self, CharPoints};
use crate::srbm::Srbm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Measure {
    Nu1,
    Nu2,
}

impl Measure {
    pub fn label(&self) -> &'static str {
        match self {
            Measure::Nu1 => "nu1",
            Measure::Nu2 => "nu2",
        }
    }
}

/// Whether the relevant coordinate of τ is below θ^(·,max) or equal to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundaryCase {
    Interior,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailAsymptotic {
    pub decay: f64,
    pub kappa: f64,
    pub category: Category,
    pub boundary_case: BoundaryCase,
}

/// ν((x, ∞)) ~ b x^κ e^(−decay·x) for ν = ν_1 or ν_2. ν_2 lives on F_2 and
/// decays at τ_1; ν_1 is handled by exchanging the coordinates.
pub fn classify_boundary_tail(s: &Srbm, measure: Measure) -> Result<TailAsymptotic> {
    match measure {
        Measure::Nu2 => classify_nu2(s),
        Measure::Nu1 => {
            let t = classify_nu2(&s.swapped())?;
            Ok(TailAsymptotic {
                category: t.category.swapped(),
                ..t
            })
        }
    }
}

fn classify_nu2(s: &Srbm) -> Result<TailAsymptotic> {
    let cp = CharPoints::compute(s);
    let category = domain::category_from_points(s, &cp)?;
    let tau = domain::tau_from_points(s, &cp)?.tau;
    let t1 = tau.x1;
    let boundary = s.approx_eq(t1, cp.max(1).x1);
    let r_is_max = points::theta_r_is_max(s, 1);

    let boundary_case = if boundary {
        BoundaryCase::Boundary
    } else {
        BoundaryCase::Interior
    };
    let tau_at_r = s.approx_eq(t1, cp.r(1).x1);
    let kappa = kappa_table(boundary_case, category, r_is_max, tau_at_r)?;
    Ok(TailAsymptotic {
        decay: t1,
        kappa,
        category,
        boundary_case,
    })
}

/// Power κ of the ν_2 tail by case, category, whether θ^(1,r) = θ^(1,max)
/// and whether τ_1 = θ^(1,r)_1.
pub fn kappa_table(
    case: BoundaryCase,
    category: Category,
    r_is_max: bool,
    tau_at_r: bool,
) -> Result<f64> {
    Ok(match (case, category) {
        (BoundaryCase::Interior, Category::CatI | Category::CatIII) => 0.0,
        (BoundaryCase::Interior, Category::CatII) => {
            if tau_at_r {
                1.0
            } else {
                0.0
            }
        }
        (BoundaryCase::Boundary, Category::CatI) => {
            if r_is_max {
                -0.5
            } else {
                -1.5
            }
        }
        (BoundaryCase::Boundary, Category::CatII) => {
            if r_is_max {
                0.0
            } else {
                -0.5
            }
        }
        (BoundaryCase::Boundary, Category::CatIII) => {
            return Err(Error::ImpossibleCase(
                "category III with τ_1 = θ^(1,max)_1".into(),
            ))
        }
    })
}
