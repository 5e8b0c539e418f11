//! Euler–Skorohod simulation of the SRBM and a variational-problem oracle.

mod oracle;
mod simulate;
mod skorohod;

pub use oracle::{regulated_endpoint, vp_cost, vp_oracle, vp_oracle_i, OracleOpts, PathSpec};
pub use simulate::{simulate, SimConfig, SimResult, Spread};
pub use skorohod::{skorohod_candidates, skorohod_step};
