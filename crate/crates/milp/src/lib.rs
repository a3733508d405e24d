//! A small, deterministic LP/MILP toolkit.
//!
//! * [`MilpModel`]: a solver-agnostic model with named variables and rows.
//! * [`solve_lp`]: bounded-variable revised simplex with sparse LU updates.
//! * [`solve_milp`]: LP-based branch-and-bound on binary variables.
//! * [`export_mps`] / [`import_mps`]: free-format MPS, byte-stable on export.
//! * [`read_cplex_sol`]: reads CPLEX-style XML `.sol` files from external solvers.

mod bnb;
mod lu;
mod model;
mod mps;
mod simplex;
mod sol;

pub use bnb::{
    relative_gap, solve_milp, solve_milp_with_start, BnbConfig, BranchingRule, MilpSolution,
    MilpStatus, NodeOrder,
};
pub use model::{
    ConId, Constraint, LinExpr, MilpModel, ModelError, Sense, VarId, VarKind, Variable, Violation,
};
pub use mps::{export_mps, import_mps, MpsError};
pub use simplex::{dual_objective, solve_lp, solve_lp_with, LpOptions, LpSolution, LpStatus};
pub use sol::{read_cplex_sol, ExternalSolution, SolError};
