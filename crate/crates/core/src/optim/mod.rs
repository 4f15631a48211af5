//! Solvers over the probability simplex `{w : w ≥ 0, Σw = 1}`.

mod qp;
mod simplex;
mod spg;

pub use qp::{kkt_residual, qp_simplex, qp_simplex_with, QuadraticObjective};
pub(crate) use qp::{solve_validated, validate_gram_for_cache};
pub use simplex::{project_simplex, SimplexWeights};
pub use spg::{spg_minimize, FnObjective, SimplexObjective, SolveReport, SpgParams};
