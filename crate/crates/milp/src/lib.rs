//! Sparse LP and mixed-binary solver.
//!
//! [`simplex_solve`] runs a bounded-variable revised simplex on a [`LinearProgram`];
//! [`branch_and_bound`] wraps it in a best-first search over the binary columns of a
//! [`MixedIntegerProgram`].

mod bnb;
mod dump;
mod error;
mod lu;
mod model;
mod presolve;
mod result;
mod simplex;

pub use bnb::{
    branch_and_bound, feasible_within, BranchAndBound, PrimalHeuristic, Progress,
    INTEGRALITY_TOL,
};
pub use dump::dump_text;
pub use error::{Error, Result};
pub use model::{LinearProgram, MixedIntegerProgram, Row, Sense};
pub use result::{relative_gap, Limits, SolveResult, Status};
pub use simplex::{kkt_residuals, simplex_solve, simplex_solve_with, KktResiduals, SimplexOptions};
