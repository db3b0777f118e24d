//! Best-first branch-and-bound over binary variables.
//!
//! Each node is the LP relaxation with some binaries fixed. Nodes are explored in
//! order of their relaxation bound; among equal bounds the most recently created
//! node goes first. The branching variable is the most fractional binary, ties
//! going to the lowest index. Each child LP is re-solved with the dual simplex
//! from its parent's optimal basis, falling back to a cold solve when that basis
//! is unusable.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use log::debug;

use crate::error::Result;
use crate::model::{LinearProgram, MixedIntegerProgram, Sense};
use crate::result::{relative_gap, Limits, SolveResult, Status};
use crate::simplex::{solve_from_basis, solve_with_basis, Basis, SimplexOptions};

/// Binaries within this distance of 0 or 1 count as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// Row-relative tolerance used to accept a candidate incumbent.
const ACCEPT_TOL: f64 = 1e-7;

/// Open nodes beyond this count are stored without a warm-start basis.
const MAX_WARM_NODES: usize = 4096;

/// Problem-specific rounding of a relaxation into a feasible point.
///
/// Proposals are checked against every row and bound before they are accepted,
/// so an implementation may return anything; infeasible proposals are ignored.
pub trait PrimalHeuristic: Sync {
    fn propose(&self, mip: &MixedIntegerProgram, relaxation: &[f64]) -> Option<Vec<f64>>;
}

/// One entry of the search log, recorded whenever the incumbent or bound changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub nodes: usize,
    pub incumbent: f64,
    pub bound: f64,
}

pub struct BranchAndBound<'a> {
    mip: &'a MixedIntegerProgram,
    limits: Limits,
    heuristic: Option<&'a dyn PrimalHeuristic>,
    heuristic_interval: usize,
    simplex: SimplexOptions,
}

struct Node {
    bound: f64,
    seq: u64,
    fixings: Vec<(usize, bool)>,
    branch_var: usize,
    basis: Option<Rc<Basis>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap pops the greatest: lowest bound first, then newest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.seq.cmp(&other.seq))
    }
}

enum Relaxation {
    Infeasible,
    Unbounded,
    Stopped(Status),
    Solved { objective: f64, x: Vec<f64> },
}

/// Solves `mip` with no primal heuristic.
pub fn branch_and_bound(mip: &MixedIntegerProgram, limits: Limits) -> Result<SolveResult> {
    BranchAndBound::new(mip, limits).solve()
}

impl<'a> BranchAndBound<'a> {
    pub fn new(mip: &'a MixedIntegerProgram, limits: Limits) -> Self {
        Self {
            mip,
            limits,
            heuristic: None,
            heuristic_interval: 16,
            simplex: SimplexOptions::default(),
        }
    }

    /// Calls `heuristic` at the root and then every `heuristic_interval` nodes.
    pub fn with_heuristic(mut self, heuristic: &'a dyn PrimalHeuristic) -> Self {
        self.heuristic = Some(heuristic);
        self
    }

    pub fn heuristic_interval(mut self, every: usize) -> Self {
        self.heuristic_interval = every.max(1);
        self
    }

    pub fn simplex_options(mut self, opts: SimplexOptions) -> Self {
        self.simplex = opts;
        self
    }

    pub fn solve(&self) -> Result<SolveResult> {
        Ok(self.solve_traced()?.0)
    }

    /// Solves and also returns the incumbent/bound trajectory.
    pub fn solve_traced(&self) -> Result<(SolveResult, Vec<Progress>)> {
        self.mip.validate()?;
        let start = Instant::now();
        let deadline = start + self.limits.time_limit;
        let lp = &self.mip.lp;
        let mut search = Search {
            bnb: self,
            deadline,
            incumbent: None,
            incumbent_obj: f64::INFINITY,
            iterations: 0,
            trace: Vec::new(),
            nodes: 0,
        };

        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        let (root, root_basis) = search.relax(&lower, &upper, None);
        search.nodes = 1;
        let (root_obj, root_x) = match root {
            Relaxation::Infeasible => return Ok(search.finish(Status::Infeasible, f64::INFINITY, start)),
            Relaxation::Unbounded => {
                return Ok(search.finish(Status::Unbounded, f64::NEG_INFINITY, start))
            }
            Relaxation::Stopped(status) => {
                return Ok(search.finish(status, f64::NEG_INFINITY, start))
            }
            Relaxation::Solved { objective, x, .. } => (objective, x),
        };
        search.log(root_obj);

        let mut heap = BinaryHeap::new();
        let mut seq = 0u64;
        match self.most_fractional(&root_x) {
            None => {
                search.offer(self.round_binaries(root_x), root_obj);
            }
            Some(j) => {
                search.try_heuristic(&root_x);
                heap.push(Node {
                    bound: root_obj,
                    seq,
                    fixings: Vec::new(),
                    branch_var: j,
                    basis: root_basis.map(Rc::new),
                });
                seq += 1;
            }
        }

        let mut global_bound = root_obj;
        let status = loop {
            let Some(top) = heap.peek() else {
                break if search.incumbent.is_some() { Status::Optimal } else { Status::Infeasible };
            };
            let open_bound = top.bound.max(global_bound);
            if open_bound > global_bound {
                global_bound = open_bound;
                search.log(global_bound);
            }
            if search.incumbent.is_some() {
                let gap = relative_gap(search.incumbent_obj, global_bound.min(search.incumbent_obj));
                if gap <= self.limits.mip_gap {
                    break if gap == 0.0 { Status::Optimal } else { Status::GapLimit };
                }
            }
            if Instant::now() >= deadline {
                break Status::TimeLimit;
            }
            if search.nodes >= self.limits.node_limit {
                break Status::NodeLimit;
            }

            let node = heap.pop().expect("peeked");
            if search.prunes(node.bound) {
                continue;
            }

            let j = node.branch_var;
            let mut stopped = None;
            for value in [false, true] {
                let mut fixings = node.fixings.clone();
                fixings.push((j, value));
                lower.copy_from_slice(&lp.lower);
                upper.copy_from_slice(&lp.upper);
                for &(k, v) in &fixings {
                    let v = if v { 1.0 } else { 0.0 };
                    lower[k] = v;
                    upper[k] = v;
                }
                let (relaxation, basis) = search.relax(&lower, &upper, node.basis.as_deref());
                search.nodes += 1;
                match relaxation {
                    Relaxation::Infeasible => {}
                    Relaxation::Unbounded => {
                        // A bounded parent cannot have an unbounded child.
                        debug!("unbounded child relaxation ignored");
                    }
                    Relaxation::Stopped(status) => {
                        stopped = Some(status);
                        break;
                    }
                    Relaxation::Solved { objective, x, .. } => {
                        let bound = objective.max(node.bound);
                        if search.prunes(bound) {
                            continue;
                        }
                        match self.most_fractional(&x) {
                            None => search.offer(self.round_binaries(x), bound),
                            Some(branch_var) => {
                                if search.nodes % self.heuristic_interval == 0 {
                                    search.try_heuristic(&x);
                                }
                                let basis = basis.filter(|_| heap.len() < MAX_WARM_NODES).map(Rc::new);
                                heap.push(Node { bound, seq, fixings, branch_var, basis });
                                seq += 1;
                            }
                        }
                    }
                }
            }
            if let Some(status) = stopped {
                break status;
            }
        };

        let bound = match status {
            Status::Optimal => search.incumbent_obj,
            Status::Infeasible => f64::INFINITY,
            _ => heap
                .peek()
                .map_or(search.incumbent_obj, |n| n.bound.max(global_bound))
                .min(search.incumbent_obj),
        };
        Ok(search.finish(status, bound, start))
    }

    fn most_fractional(&self, x: &[f64]) -> Option<usize> {
        let mut best = None;
        let mut best_frac = INTEGRALITY_TOL;
        for &j in &self.mip.binaries {
            let frac = (x[j] - x[j].floor()).min(x[j].ceil() - x[j]);
            if frac > best_frac || (frac == best_frac && best.is_some_and(|b| j < b)) {
                best_frac = frac;
                best = Some(j);
            }
        }
        best
    }

    fn round_binaries(&self, mut x: Vec<f64>) -> Vec<f64> {
        for &j in &self.mip.binaries {
            x[j] = x[j].round();
        }
        x
    }
}

struct Search<'s, 'a> {
    bnb: &'s BranchAndBound<'a>,
    deadline: Instant,
    incumbent: Option<Vec<f64>>,
    incumbent_obj: f64,
    iterations: usize,
    trace: Vec<Progress>,
    nodes: usize,
}

impl Search<'_, '_> {
    fn relax(&mut self, lower: &[f64], upper: &[f64], warm: Option<&Basis>) -> (Relaxation, Option<Basis>) {
        let mut opts = self.bnb.simplex;
        opts.deadline = Some(self.deadline);
        let lp = &self.bnb.mip.lp;
        let (r, basis) = match warm.and_then(|b| solve_from_basis(lp, lower, upper, &opts, b)) {
            Some(solved) => solved,
            None => solve_with_basis(lp, lower, upper, &opts),
        };
        self.iterations += r.simplex_iterations;
        let relaxation = match r.status {
            Status::Optimal => Relaxation::Solved {
                objective: r.objective,
                x: r.solution,
            },
            Status::Infeasible => Relaxation::Infeasible,
            Status::Unbounded => Relaxation::Unbounded,
            other => Relaxation::Stopped(other),
        };
        (relaxation, basis)
    }

    fn prunes(&self, bound: f64) -> bool {
        self.incumbent.is_some()
            && bound >= self.incumbent_obj - 1e-9 * (1.0 + self.incumbent_obj.abs())
    }

    fn log(&mut self, bound: f64) {
        self.trace.push(Progress { nodes: self.nodes, incumbent: self.incumbent_obj, bound });
    }

    fn try_heuristic(&mut self, relaxation: &[f64]) {
        let Some(h) = self.bnb.heuristic else { return };
        if let Some(x) = h.propose(self.bnb.mip, relaxation) {
            let obj = self.bnb.mip.lp.evaluate(&x);
            self.offer(x, obj);
        }
    }

    /// Accepts `x` as incumbent if it is feasible and strictly better.
    fn offer(&mut self, x: Vec<f64>, _bound: f64) {
        let mip = self.bnb.mip;
        if x.len() != mip.lp.num_vars() || mip.max_fractionality(&x) > INTEGRALITY_TOL {
            return;
        }
        if !feasible_within(&mip.lp, &x, ACCEPT_TOL) {
            debug!("rejected infeasible incumbent candidate");
            return;
        }
        let obj = mip.lp.evaluate(&x);
        if obj < self.incumbent_obj {
            debug!("new incumbent {obj} at node {}", self.nodes);
            self.incumbent_obj = obj;
            self.incumbent = Some(x);
            let bound = self.trace.last().map_or(f64::NEG_INFINITY, |p| p.bound);
            self.log(bound);
        }
    }

    fn finish(self, status: Status, bound: f64, start: Instant) -> (SolveResult, Vec<Progress>) {
        let mut r = SolveResult::empty(status);
        r.nodes = self.nodes;
        r.simplex_iterations = self.iterations;
        if let Some(x) = self.incumbent {
            r.objective = self.incumbent_obj;
            r.solution = x;
            r.best_bound = bound;
            r.gap = if status == Status::Optimal { 0.0 } else { relative_gap(self.incumbent_obj, bound) };
        } else if status != Status::Infeasible && status != Status::Unbounded {
            r.best_bound = bound;
        }
        r.wall_time = start.elapsed();
        debug!(
            "branch-and-bound {status}: obj {} bound {} nodes {} time {:?}",
            r.objective, r.best_bound, r.nodes, r.wall_time
        );
        (r, self.trace)
    }
}

/// True when every bound and row holds within `tol * (1 + |rhs|)`.
pub fn feasible_within(lp: &LinearProgram, x: &[f64], tol: f64) -> bool {
    for (j, &v) in x.iter().enumerate() {
        if v < lp.lower[j] - tol * (1.0 + lp.lower[j].abs())
            || v > lp.upper[j] + tol * (1.0 + lp.upper[j].abs())
        {
            return false;
        }
    }
    lp.rows.iter().zip(lp.activities(x)).all(|(row, act)| {
        let t = tol * (1.0 + row.rhs.abs());
        match row.sense {
            Sense::Le => act <= row.rhs + t,
            Sense::Ge => act >= row.rhs - t,
            Sense::Eq => (act - row.rhs).abs() <= t,
        }
    })
}
