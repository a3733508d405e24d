use std::fmt;
use std::time::Duration;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionStatus {
    /// Proven within the requested gap.
    Optimal,
    /// Feasible dispatch found; limits stopped the proof.
    FeasibleGap,
    Infeasible,
    Unbounded,
    /// Limits hit with no feasible dispatch found.
    Limit,
}

impl SolutionStatus {
    pub fn label(self) -> &'static str {
        match self {
            SolutionStatus::Optimal => "optimal",
            SolutionStatus::FeasibleGap => "feasible-gap",
            SolutionStatus::Infeasible => "infeasible",
            SolutionStatus::Unbounded => "unbounded",
            SolutionStatus::Limit => "limit",
        }
    }

    pub fn has_dispatch(self) -> bool {
        matches!(self, SolutionStatus::Optimal | SolutionStatus::FeasibleGap)
    }
}

impl fmt::Display for SolutionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A dispatch schedule. Vectors are empty when there is no dispatch.
#[derive(Clone, Debug, PartialEq)]
pub struct DispatchSolution {
    pub status: SolutionStatus,
    /// Total cost in $ over the horizon.
    pub objective: Option<f64>,
    pub gap: f64,
    /// `p[gen][hour]`, MW.
    pub p: Vec<Vec<f64>>,
    /// `theta[bus][hour]`, radians.
    pub theta: Vec<Vec<f64>>,
    /// `flow[branch][hour]`, MW from `from_bus` to `to_bus`.
    pub flow: Vec<Vec<f64>>,
    /// `tap[branch][hour]`, per-unit.
    pub tap: Vec<Vec<f64>>,
    /// `shift[branch][hour]`, radians.
    pub shift: Vec<Vec<f64>>,
    /// Per branch: hours in which the (tap, shift) setting changed.
    pub adjust_counts: Vec<(u32, u32)>,
    pub solve_time: Duration,
    pub nodes: usize,
}

impl DispatchSolution {
    pub fn without_dispatch(status: SolutionStatus, solve_time: Duration) -> Self {
        DispatchSolution {
            status,
            objective: None,
            gap: f64::INFINITY,
            p: Vec::new(),
            theta: Vec::new(),
            flow: Vec::new(),
            tap: Vec::new(),
            shift: Vec::new(),
            adjust_counts: Vec::new(),
            solve_time,
            nodes: 0,
        }
    }

    pub fn horizon(&self) -> usize {
        self.p.first().or(self.theta.first()).map_or(0, Vec::len)
    }
}
