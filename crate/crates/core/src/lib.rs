//! Multi-period economic dispatch with adjustable transformer taps and phase
//! shifters.
//!
//! The nonlinear DC flow `(θf − θt − δ)/(τx)` of a branch with a discrete tap
//! set is rewritten as an exact mixed-integer linear model (see [`plt`]), so
//! that the whole dispatch is a MILP solved by the in-house branch-and-bound
//! of `tapdispatch-milp`.
//!
//! * [`network`]: case data, TOML loading and validation.
//! * [`physics`]: DC and exact AC branch power, DC error reports.
//! * [`plt`]: the piecewise-linear encoding of tap quotients.
//! * [`formulation`]: ED0 (fixed devices) and ED1 (adjustable devices) models.
//! * [`dispatch`]: solving and reading back schedules.
//! * [`harness`]: the `run` and `check` workflows behind the CLI.

pub mod dispatch;
pub mod formulation;
pub mod harness;
pub mod network;
pub mod physics;
pub mod plt;
pub mod solution;

pub use dispatch::{solve_ed0, solve_ed1, solve_model, DispatchError, SolveOptions};
pub use formulation::{
    build_ed0, build_ed1, build_ed1_with, build_with_devices, extract_solution, DeviceSchedule,
    DispatchModel, Ed1Options, ModelKind,
};
pub use network::{load_case, serialize_case, validate_case, CaseError, NetworkCase};
pub use plt::EncodingVariant;
pub use solution::{DispatchSolution, SolutionStatus};
