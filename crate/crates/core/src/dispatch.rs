//! Solve orchestration: build a model, run branch-and-bound, read back the
//! schedule.

use std::time::Duration;

use tapdispatch_milp::{
    solve_milp_with_start, BnbConfig, BranchingRule, MilpStatus, NodeOrder,
};
use thiserror::Error;

use crate::formulation::{
    build_ed0, build_ed1_with, extract_solution, DispatchModel, Ed1Options, ExtractError,
    FormulationError,
};
use crate::network::NetworkCase;
use crate::plt::EncodingVariant;
use crate::solution::{DispatchSolution, SolutionStatus};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Relative optimality gap.
    pub gap: f64,
    pub variant: EncodingVariant,
    pub shift_grid: bool,
    pub flow_cuts: bool,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
    pub branching: BranchingRule,
    pub node_order: NodeOrder,
    /// Seed the search with the no-adjustment schedule.
    pub neutral_start: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gap: 1e-4,
            variant: EncodingVariant::default(),
            shift_grid: false,
            flow_cuts: true,
            time_limit: None,
            node_limit: None,
            branching: BranchingRule::MostFractional,
            node_order: NodeOrder::BestBound,
            neutral_start: true,
        }
    }
}

impl SolveOptions {
    fn bnb(&self) -> BnbConfig {
        BnbConfig {
            relative_gap: self.gap,
            node_limit: self.node_limit,
            time_limit: self.time_limit,
            branching: self.branching,
            node_order: self.node_order,
            ..BnbConfig::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

/// Solves an already built model.
pub fn solve_model(
    dm: &DispatchModel,
    case: &NetworkCase,
    opts: &SolveOptions,
) -> Result<DispatchSolution, ExtractError> {
    let start = if opts.neutral_start && dm.milp.num_binaries() > 0 {
        Some(dm.neutral_start(case))
    } else {
        None
    };
    let res = solve_milp_with_start(&dm.milp, &opts.bnb(), start.as_deref());
    log::info!(
        "{} {}: {:?} after {} nodes, {} LP iterations, {:.3}s",
        case.name,
        dm.kind.label(),
        res.status,
        res.nodes,
        res.lp_iterations,
        res.elapsed.as_secs_f64()
    );
    let status = match res.status {
        MilpStatus::Optimal => SolutionStatus::Optimal,
        MilpStatus::Infeasible => SolutionStatus::Infeasible,
        MilpStatus::Unbounded => SolutionStatus::Unbounded,
        MilpStatus::Limit if res.has_incumbent() => SolutionStatus::FeasibleGap,
        MilpStatus::Limit => SolutionStatus::Limit,
    };
    let Some(x) = res.assignment.as_deref().filter(|_| status.has_dispatch()) else {
        let mut s = DispatchSolution::without_dispatch(status, res.elapsed);
        s.nodes = res.nodes;
        return Ok(s);
    };
    let mut s = extract_solution(dm, case, x)?;
    s.status = status;
    s.gap = res.gap;
    s.solve_time = res.elapsed;
    s.nodes = res.nodes;
    Ok(s)
}

pub fn solve_ed0(
    case: &NetworkCase,
    opts: &SolveOptions,
) -> Result<(DispatchModel, DispatchSolution), DispatchError> {
    let dm = build_ed0(case)?;
    let s = solve_model(&dm, case, opts)?;
    Ok((dm, s))
}

pub fn solve_ed1(
    case: &NetworkCase,
    opts: &SolveOptions,
) -> Result<(DispatchModel, DispatchSolution), DispatchError> {
    let dm = build_ed1_with(
        case,
        Ed1Options {
            variant: opts.variant,
            shift_grid: opts.shift_grid,
            flow_cuts: opts.flow_cuts,
        },
    )?;
    let s = solve_model(&dm, case, opts)?;
    Ok((dm, s))
}
