use thiserror::Error;

use crate::srbm::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid SRBM instance: {0}")]
    InvalidInstance(ValidationReport),

    #[error("direction must be nonzero")]
    ZeroDirection,

    #[error("direction must lie in the nonnegative quadrant, got ({0}, {1})")]
    NegativeDirection(f64, f64),

    #[error("instance fits none of categories I, II, III")]
    Unclassifiable,

    #[error("inconsistent criteria: {0}")]
    InconsistentCriteria(String),

    #[error("argument outside the support: {0}")]
    OutOfSupport(f64),

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    #[error("impossible case: {0}")]
    ImpossibleCase(String),

    #[error("tail beyond the sampled horizon carries {fraction:e} of the mass")]
    InsufficientHorizon { fraction: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("samples are not in the asymptotic regime: decay {wide} vs {narrow}")]
    NonAsymptoticRegime { wide: f64, narrow: f64 },

    #[error("complementarity problem has no feasible active set")]
    NoSolution,

    #[error("invalid configuration: {0}")]
    ConfigError(String),

    #[error("no candidate path reaches the endpoint")]
    NoFeasiblePath,
}

pub type Result<T> = std::result::Result<T, Error>;
