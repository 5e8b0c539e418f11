//! Two-dimensional semimartingale reflecting Brownian motion: geometry of
//! the ellipse γ = 0 and its rays, convergence domains, the large
//! deviations rate function, product form and boundary tail asymptotics,
//! with a path simulator and a variational-problem oracle for cross checks.

pub mod adh;
pub mod domain;
pub mod error;
pub mod geometry;
pub mod points;
pub mod rate;
pub mod sim;
pub mod srbm;
pub mod tail;

pub use adh::{ExitVelocities, ProductFormResult};
pub use domain::{Category, DomainCase, Domains, Tau};
pub use error::{Error, Result};
pub use geometry::{Matrix2, Vector2};
pub use points::CharPoints;
pub use rate::{CaseFired, RateResult};
pub use sim::{PathSpec, SimConfig, SimResult};
pub use srbm::{Condition, Srbm, SrbmData, ValidationReport, DEFAULT_TOL};
pub use tail::{AsymptoteFit, BoundaryCase, Measure, TailAsymptotic, TailSamples};
