use std::fmt;
use std::time::Duration;

/// Outcome of an LP or MILP solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    /// Proven optimal (for a MILP: the tree was exhausted, gap within solver tolerance).
    Optimal,
    Infeasible,
    Unbounded,
    /// Stopped because the relative gap fell below the requested `mip_gap`.
    GapLimit,
    TimeLimit,
    NodeLimit,
    /// The simplex could not reach a trustworthy answer (singular bases, cycling).
    NumericalFailure,
}

impl Status {
    /// True when the result carries a usable primal solution that met its gap target.
    pub fn is_success(self) -> bool {
        matches!(self, Status::Optimal | Status::GapLimit)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::GapLimit => "gap_limit",
            Status::TimeLimit => "time_limit",
            Status::NodeLimit => "node_limit",
            Status::NumericalFailure => "numerical_failure",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Primal (and, for LPs, dual) information returned by a solve.
///
/// `solution` is empty when no feasible point is known. For LP solves
/// `best_bound == objective` and `gap == 0`.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: Status,
    pub solution: Vec<f64>,
    pub objective: f64,
    pub best_bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub simplex_iterations: usize,
    pub wall_time: Duration,
    /// Row duals `y` (LP solves only).
    pub duals: Option<Vec<f64>>,
    /// Reduced costs `c - A'y` (LP solves only).
    pub reduced_costs: Option<Vec<f64>>,
}

impl SolveResult {
    pub(crate) fn empty(status: Status) -> Self {
        let objective = match status {
            Status::Infeasible => f64::INFINITY,
            Status::Unbounded => f64::NEG_INFINITY,
            _ => f64::NAN,
        };
        Self {
            status,
            solution: Vec::new(),
            objective,
            best_bound: objective,
            gap: f64::INFINITY,
            nodes: 0,
            simplex_iterations: 0,
            wall_time: Duration::ZERO,
            duals: None,
            reduced_costs: None,
        }
    }

    pub fn has_solution(&self) -> bool {
        !self.solution.is_empty()
    }
}

/// Termination controls for branch-and-bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    /// Relative gap `(incumbent - bound) / |incumbent|` at which the search stops.
    pub mip_gap: f64,
    pub time_limit: Duration,
    pub node_limit: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            mip_gap: 1e-4,
            time_limit: Duration::from_secs(60),
            node_limit: usize::MAX,
        }
    }
}

/// Relative gap with the convention used throughout the crate.
pub fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    if !incumbent.is_finite() {
        return f64::INFINITY;
    }
    let diff = (incumbent - bound).max(0.0);
    if diff <= 1e-9 * (1.0 + incumbent.abs()) {
        0.0
    } else {
        diff / incumbent.abs().max(1e-10)
    }
}
