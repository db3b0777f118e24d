//! Bounded-variable primal revised simplex.
//!
//! Every row `i` gets a slack `s_i` with `a_i x + s_i = b_i`; the sense of the row is
//! encoded in the slack bounds. Rows whose slack cannot absorb the initial residual
//! get an artificial column, and phase 1 minimizes the sum of artificials. The basis
//! inverse is kept as a sparse LU factorization plus a product-form eta file that is
//! rebuilt every `refactor_every` pivots.
//!
//! Pricing is Dantzig's rule; after `degenerate_streak` consecutive degenerate pivots
//! the solver switches to Bland's rule until the objective moves again.

use std::time::Instant;

use log::debug;

use crate::error::Result;
use crate::lu::LuFactors;
use crate::model::{LinearProgram, Sense};
use crate::presolve::{presolve, Presolve};
use crate::result::{SolveResult, Status};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Primal feasibility tolerance (absolute, row units).
    pub feasibility_tol: f64,
    /// Reduced-cost tolerance, relative to the largest objective coefficient.
    pub optimality_tol: f64,
    pub refactor_every: usize,
    pub degenerate_streak: usize,
    /// Hard cap on pivots; `None` picks a limit from the problem size.
    pub max_iterations: Option<usize>,
    /// Drop fixed columns and empty rows before solving.
    pub presolve: bool,
    pub deadline: Option<Instant>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-10,
            refactor_every: 80,
            degenerate_streak: 60,
            max_iterations: None,
            presolve: true,
            deadline: None,
        }
    }
}

/// Solves `lp` with default options.
pub fn simplex_solve(lp: &LinearProgram) -> Result<SolveResult> {
    simplex_solve_with(lp, &SimplexOptions::default())
}

pub fn simplex_solve_with(lp: &LinearProgram, opts: &SimplexOptions) -> Result<SolveResult> {
    lp.validate()?;
    Ok(solve_bounded(lp, &lp.lower, &lp.upper, opts))
}

/// Solves `lp` with its bounds replaced by `lower`/`upper`. Inputs must be validated.
pub(crate) fn solve_bounded(
    lp: &LinearProgram,
    lower: &[f64],
    upper: &[f64],
    opts: &SimplexOptions,
) -> SolveResult {
    let start = Instant::now();
    let mut result = if opts.presolve {
        match presolve(lp, lower, upper, opts.feasibility_tol) {
            Presolve::Infeasible => SolveResult::empty(Status::Infeasible),
            Presolve::Reduced(red) => {
                let r = Simplex::new(&red.lp, &red.lp.lower, &red.lp.upper, opts).run();
                red.restore(lp, r)
            }
        }
    } else if lower.iter().zip(upper).any(|(l, u)| l > u) {
        SolveResult::empty(Status::Infeasible)
    } else {
        Simplex::new(lp, lower, upper, opts).run()
    };
    result.wall_time = start.elapsed();
    result
}

/// Final basis of a solve, reusable as a warm start after bound changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Basis {
    /// Basic column per row; columns `n..n + m` are the row slacks.
    basic: Vec<u32>,
    /// Nonbasic columns resting at their upper bound.
    at_upper: Vec<bool>,
}

/// Like [`solve_bounded`] without presolve, also returning the final basis.
pub(crate) fn solve_with_basis(
    lp: &LinearProgram,
    lower: &[f64],
    upper: &[f64],
    opts: &SimplexOptions,
) -> (SolveResult, Option<Basis>) {
    let start = Instant::now();
    if lower.iter().zip(upper).any(|(l, u)| l > u) {
        return (SolveResult::empty(Status::Infeasible), None);
    }
    let mut s = Simplex::new(lp, lower, upper, opts);
    let mut r = s.run();
    r.wall_time = start.elapsed();
    let basis = (r.status == Status::Optimal).then(|| s.snapshot()).flatten();
    (r, basis)
}

/// Re-solves from `basis` with the dual simplex. Returns `None` when the basis
/// cannot be used (dual infeasible, singular or stalled); the caller should then
/// solve from scratch.
pub(crate) fn solve_from_basis(
    lp: &LinearProgram,
    lower: &[f64],
    upper: &[f64],
    opts: &SimplexOptions,
    basis: &Basis,
) -> Option<(SolveResult, Option<Basis>)> {
    let start = Instant::now();
    if lower.iter().zip(upper).any(|(l, u)| l > u) {
        return Some((SolveResult::empty(Status::Infeasible), None));
    }
    let mut s = Simplex::from_basis(lp, lower, upper, opts, basis)?;
    let mut r = s.run_dual()?;
    if r.status == Status::Infeasible {
        // Pruning on a false infeasibility would lose the optimum; let a cold solve decide.
        return None;
    }
    r.wall_time = start.elapsed();
    let basis = (r.status == Status::Optimal).then(|| s.snapshot()).flatten();
    Some((r, basis))
}

struct Eta {
    pos: usize,
    pivot: f64,
    idx: Vec<usize>,
    val: Vec<f64>,
}

enum Step {
    Optimal,
    TimeLimit,
    Unbounded,
    Failed,
}

struct Simplex<'a> {
    lp: &'a LinearProgram,
    opts: SimplexOptions,
    m: usize,
    n: usize,
    // Columns: structurals, then slacks, then artificials.
    col_start: Vec<usize>,
    col_idx: Vec<usize>,
    col_val: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    cost_scale: f64,
    b: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    pos_of: Vec<usize>,
    lu: LuFactors,
    etas: Vec<Eta>,
    iterations: usize,
    max_iterations: usize,
    degenerate_run: usize,
    bland: bool,
    // scratch
    y: Vec<f64>,
    alpha: Vec<f64>,
}

impl<'a> Simplex<'a> {
    /// Structural columns followed by one slack per row, in compressed column form,
    /// with the slack bounds encoding each row's sense.
    fn with_slacks(lp: &'a LinearProgram, lower: &[f64], upper: &[f64], opts: &SimplexOptions) -> Self {
        let m = lp.num_rows();
        let n = lp.num_vars();

        let mut counts = vec![0usize; n];
        for row in &lp.rows {
            for &(j, _) in &row.coeffs {
                counts[j] += 1;
            }
        }
        let mut col_start = Vec::with_capacity(n + 2 * m + 1);
        col_start.push(0);
        for j in 0..n {
            col_start.push(col_start[j] + counts[j]);
        }
        let nnz = col_start[n];
        let mut col_idx = vec![0; nnz];
        let mut col_val = vec![0.0; nnz];
        let mut fill = col_start[..n].to_vec();
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                col_idx[fill[j]] = i;
                col_val[fill[j]] = a;
                fill[j] += 1;
            }
        }

        let cost_scale = lp
            .objective
            .iter()
            .fold(0.0f64, |acc, c| acc.max(c.abs()))
            .max(f64::MIN_POSITIVE);
        let cost_scale = if cost_scale < 1e-300 { 1.0 } else { cost_scale };

        let mut lo = lower.to_vec();
        let mut hi = upper.to_vec();
        for (i, row) in lp.rows.iter().enumerate() {
            col_idx.push(i);
            col_val.push(1.0);
            col_start.push(col_idx.len());
            let (l, h) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lo.push(l);
            hi.push(h);
        }
        let x = vec![0.0; n + m];

        let max_iterations = opts
            .max_iterations
            .unwrap_or(50 * (m + n) + 20_000);

        Simplex {
            lp,
            opts: *opts,
            m,
            n,
            col_start,
            col_idx,
            col_val,
            lo,
            hi,
            cost: vec![0.0; n + m],
            cost_scale,
            b: lp.rows.iter().map(|r| r.rhs).collect(),
            x,
            basis: vec![NONE; m],
            pos_of: vec![NONE; n + m],
            lu: LuFactors::default(),
            etas: Vec::new(),
            iterations: 0,
            max_iterations,
            degenerate_run: 0,
            bland: false,
            y: vec![0.0; m],
            alpha: vec![0.0; m],
        }
    }

    /// Cold start: structurals at a finite bound, slacks basic where they can
    /// absorb the residual, artificials elsewhere.
    fn new(lp: &'a LinearProgram, lower: &[f64], upper: &[f64], opts: &SimplexOptions) -> Self {
        let mut s = Self::with_slacks(lp, lower, upper, opts);
        let (n, m) = (s.n, s.m);
        for j in 0..n {
            s.x[j] = s.resting_value(j, false);
        }
        let mut residual = s.b.clone();
        for j in 0..n {
            if s.x[j] != 0.0 {
                for k in s.col_start[j]..s.col_start[j + 1] {
                    residual[s.col_idx[k]] -= s.col_val[k] * s.x[j];
                }
            }
        }
        for i in 0..m {
            let sl = n + i;
            let r = residual[i];
            if r >= s.lo[sl] && r <= s.hi[sl] {
                s.x[sl] = r;
                s.basis[i] = sl;
            } else {
                let v = r.clamp(s.lo[sl], s.hi[sl]);
                s.x[sl] = v;
                let d = r - v;
                s.col_idx.push(i);
                s.col_val.push(d.signum());
                s.col_start.push(s.col_idx.len());
                s.lo.push(0.0);
                s.hi.push(f64::INFINITY);
                s.x.push(d.abs());
                s.basis[i] = s.x.len() - 1;
            }
        }
        let total = s.x.len();
        s.cost = vec![0.0; total];
        s.pos_of = vec![NONE; total];
        for (p, &j) in s.basis.iter().enumerate() {
            s.pos_of[j] = p;
        }
        s
    }

    /// Warm start from a basis of an earlier solve of the same rows.
    fn from_basis(lp: &'a LinearProgram, lower: &[f64], upper: &[f64], opts: &SimplexOptions, basis: &Basis) -> Option<Self> {
        let mut s = Self::with_slacks(lp, lower, upper, opts);
        if basis.basic.len() != s.m || basis.at_upper.len() != s.n + s.m {
            return None;
        }
        for (p, &j) in basis.basic.iter().enumerate() {
            let j = j as usize;
            if j >= s.n + s.m || s.pos_of[j] != NONE {
                return None;
            }
            s.basis[p] = j;
            s.pos_of[j] = p;
        }
        for j in 0..s.n + s.m {
            if s.pos_of[j] == NONE {
                s.x[j] = s.resting_value(j, basis.at_upper[j]);
            }
        }
        Some(s)
    }

    /// Value of a nonbasic column: the preferred bound if finite, else the other, else 0.
    fn resting_value(&self, j: usize, prefer_upper: bool) -> f64 {
        let (l, h) = (self.lo[j], self.hi[j]);
        if prefer_upper && h.is_finite() {
            h
        } else if l.is_finite() {
            l
        } else if h.is_finite() {
            h
        } else {
            0.0
        }
    }

    /// Snapshot of the final basis with artificials replaced by their row slacks.
    fn snapshot(&self) -> Option<Basis> {
        let mut basic = Vec::with_capacity(self.m);
        let mut taken = vec![false; self.n + self.m];
        for &j in &self.basis {
            let j = if self.is_artificial(j) {
                self.n + self.col_idx[self.col_start[j]]
            } else {
                j
            };
            if taken[j] {
                return None;
            }
            taken[j] = true;
            basic.push(j as u32);
        }
        let at_upper = (0..self.n + self.m)
            .map(|j| !taken[j] && self.hi[j].is_finite() && self.lo[j] < self.hi[j] && self.x[j] >= self.hi[j])
            .collect();
        Some(Basis { basic, at_upper })
    }

    fn num_cols(&self) -> usize {
        self.x.len()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n + self.m
    }

    fn run(&mut self) -> SolveResult {
        let has_artificials = self.num_cols() > self.n + self.m;
        if !self.refactor() {
            return self.failure(Status::NumericalFailure);
        }

        if has_artificials {
            for j in 0..self.num_cols() {
                self.cost[j] = if self.is_artificial(j) { 1.0 } else { 0.0 };
            }
            match self.iterate() {
                Step::Optimal => {}
                Step::TimeLimit => return self.failure(Status::TimeLimit),
                Step::Unbounded | Step::Failed => return self.failure(Status::NumericalFailure),
            }
            let infeasibility: f64 = (self.n + self.m..self.num_cols()).map(|j| self.x[j]).sum();
            let scale = 1.0 + self.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            debug!(
                "phase 1 finished after {} iterations, infeasibility {infeasibility:e}",
                self.iterations
            );
            if infeasibility > 1e-8 * scale {
                return self.failure(Status::Infeasible);
            }
            for j in self.n + self.m..self.num_cols() {
                self.lo[j] = 0.0;
                self.hi[j] = 0.0;
                if self.pos_of[j] == NONE {
                    self.x[j] = 0.0;
                }
            }
        }

        for j in 0..self.num_cols() {
            self.cost[j] = if j < self.n {
                self.lp.objective[j] / self.cost_scale
            } else {
                0.0
            };
        }
        self.bland = false;
        self.degenerate_run = 0;
        match self.iterate() {
            Step::Optimal => self.finish(),
            Step::Unbounded => self.failure(Status::Unbounded),
            Step::TimeLimit => self.failure(Status::TimeLimit),
            Step::Failed => self.failure(Status::NumericalFailure),
        }
    }

    fn failure(&self, status: Status) -> SolveResult {
        let mut r = SolveResult::empty(status);
        r.simplex_iterations = self.iterations;
        r
    }

    fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.col_start[j], self.col_start[j + 1]);
        (&self.col_idx[s..e], &self.col_val[s..e])
    }

    /// Rebuilds the LU factors and recomputes basic values from scratch.
    fn refactor(&mut self) -> bool {
        for _attempt in 0..3 {
            let basis = self.basis.clone();
            let fact = {
                let this = &*self;
                LuFactors::factorize(this.m, |p| this.column(basis[p]))
            };
            match fact {
                Ok(lu) => {
                    self.lu = lu;
                    self.etas.clear();
                    self.recompute_basic_values();
                    return true;
                }
                Err(singular) => {
                    debug!(
                        "singular basis: replacing {} columns with slacks",
                        singular.positions.len()
                    );
                    for (&p, &row) in singular.positions.iter().zip(&singular.rows) {
                        let leaving = self.basis[p];
                        self.pos_of[leaving] = NONE;
                        self.x[leaving] = self.nearest_bound(leaving, self.x[leaving]);
                        let slack = self.n + row;
                        let old = self.pos_of[slack];
                        debug_assert_eq!(old, NONE);
                        self.basis[p] = slack;
                        self.pos_of[slack] = p;
                    }
                }
            }
        }
        false
    }

    fn nearest_bound(&self, j: usize, v: f64) -> f64 {
        let (l, h) = (self.lo[j], self.hi[j]);
        match (l.is_finite(), h.is_finite()) {
            (true, true) => {
                if (v - l).abs() <= (h - v).abs() {
                    l
                } else {
                    h
                }
            }
            (true, false) => l,
            (false, true) => h,
            (false, false) => 0.0,
        }
    }

    fn recompute_basic_values(&mut self) {
        let mut r = self.b.clone();
        for j in 0..self.num_cols() {
            if self.pos_of[j] == NONE && self.x[j] != 0.0 {
                let v = self.x[j];
                for k in self.col_start[j]..self.col_start[j + 1] {
                    r[self.col_idx[k]] -= self.col_val[k] * v;
                }
            }
        }
        self.lu.ftran(&mut r);
        for (p, &j) in self.basis.iter().enumerate() {
            self.x[j] = r[p];
        }
    }

    fn ftran(&mut self, rhs: &mut [f64]) {
        self.lu.ftran(rhs);
        for eta in &self.etas {
            let v = rhs[eta.pos] / eta.pivot;
            rhs[eta.pos] = v;
            if v != 0.0 {
                for (&i, &a) in eta.idx.iter().zip(&eta.val) {
                    rhs[i] -= a * v;
                }
            }
        }
    }

    fn btran(&mut self, rhs: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut v = rhs[eta.pos];
            for (&i, &a) in eta.idx.iter().zip(&eta.val) {
                v -= a * rhs[i];
            }
            rhs[eta.pos] = v / eta.pivot;
        }
        self.lu.btran(rhs);
    }

    fn compute_duals(&mut self) {
        let mut y = std::mem::take(&mut self.y);
        for (p, &j) in self.basis.iter().enumerate() {
            y[p] = self.cost[j];
        }
        self.btran(&mut y);
        self.y = y;
    }

    fn reduced_cost(&self, j: usize) -> f64 {
        let mut d = self.cost[j];
        for k in self.col_start[j]..self.col_start[j + 1] {
            d -= self.y[self.col_idx[k]] * self.col_val[k];
        }
        d
    }

    /// Picks an entering column and the direction it moves in.
    fn price(&self) -> Option<(usize, f64, f64)> {
        let tol = self.opts.optimality_tol;
        let mut best: Option<(usize, f64, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.num_cols() {
            if self.pos_of[j] != NONE || self.lo[j] == self.hi[j] {
                continue;
            }
            let d = self.reduced_cost(j);
            let xj = self.x[j];
            let can_increase = xj < self.hi[j];
            let can_decrease = xj > self.lo[j];
            let dir = if d < -tol && can_increase {
                1.0
            } else if d > tol && can_decrease {
                -1.0
            } else {
                continue;
            };
            if self.bland {
                return Some((j, dir, d));
            }
            let score = d.abs();
            if score > best_score {
                best_score = score;
                best = Some((j, dir, d));
            }
        }
        best
    }

    fn iterate(&mut self) -> Step {
        let feas_tol = self.opts.feasibility_tol;
        let mut verified = false;
        loop {
            if self.iterations >= self.max_iterations {
                debug!("iteration limit {} reached", self.max_iterations);
                return Step::Failed;
            }
            if self.iterations % 64 == 0 {
                if let Some(deadline) = self.opts.deadline {
                    if Instant::now() >= deadline {
                        return Step::TimeLimit;
                    }
                }
            }
            if self.etas.len() >= self.opts.refactor_every && !self.refactor() {
                return Step::Failed;
            }
            self.compute_duals();
            let Some((q, dir, _d)) = self.price() else {
                // Confirm optimality against freshly factorized values before stopping.
                if !verified && !self.etas.is_empty() {
                    if !self.refactor() {
                        return Step::Failed;
                    }
                    verified = true;
                    continue;
                }
                return Step::Optimal;
            };
            verified = false;

            let mut alpha = std::mem::take(&mut self.alpha);
            alpha.iter_mut().for_each(|v| *v = 0.0);
            for k in self.col_start[q]..self.col_start[q + 1] {
                alpha[self.col_idx[k]] = self.col_val[k];
            }
            self.ftran(&mut alpha);

            // Harris two-pass ratio test.
            let piv_tol = 1e-9;
            let mut t_max = self.hi[q] - self.lo[q];
            for p in 0..self.m {
                let a = alpha[p];
                if a.abs() <= piv_tol {
                    continue;
                }
                let j = self.basis[p];
                let delta = -dir * a;
                let bound = if delta < 0.0 {
                    (self.x[j] - self.lo[j] + feas_tol) / -delta
                } else {
                    (self.hi[j] - self.x[j] + feas_tol) / delta
                };
                if bound < t_max {
                    t_max = bound;
                }
            }
            if t_max == f64::INFINITY {
                self.alpha = alpha;
                return Step::Unbounded;
            }
            let mut leave = NONE;
            let mut leave_ratio = f64::INFINITY;
            let mut leave_mag = 0.0;
            for p in 0..self.m {
                let a = alpha[p];
                if a.abs() <= piv_tol {
                    continue;
                }
                let j = self.basis[p];
                let delta = -dir * a;
                let ratio = if delta < 0.0 {
                    (self.x[j] - self.lo[j]) / -delta
                } else {
                    (self.hi[j] - self.x[j]) / delta
                };
                if ratio > t_max {
                    continue;
                }
                let better = if self.bland {
                    leave == NONE
                        || ratio < leave_ratio - 1e-12
                        || (ratio <= leave_ratio + 1e-12 && j < self.basis[leave])
                } else {
                    a.abs() > leave_mag
                };
                if better {
                    leave = p;
                    leave_ratio = ratio;
                    leave_mag = a.abs();
                }
            }

            let flip = self.hi[q] - self.lo[q];
            let step = if leave == NONE || flip <= leave_ratio.max(0.0) {
                leave = NONE;
                flip
            } else {
                leave_ratio.max(0.0)
            };

            if step.abs() <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run >= self.opts.degenerate_streak && !self.bland {
                    debug!("degenerate streak at iteration {}, switching to Bland's rule", self.iterations);
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
                self.bland = false;
            }

            if step != 0.0 {
                for p in 0..self.m {
                    let a = alpha[p];
                    if a != 0.0 {
                        let j = self.basis[p];
                        self.x[j] -= dir * a * step;
                    }
                }
            }
            self.x[q] += dir * step;
            self.iterations += 1;

            if leave == NONE {
                // Bound flip: the entering column moves to its opposite bound.
                self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                self.alpha = alpha;
                continue;
            }

            let j_out = self.basis[leave];
            let delta = -dir * alpha[leave];
            self.x[j_out] = if delta < 0.0 { self.lo[j_out] } else { self.hi[j_out] };
            if !self.x[j_out].is_finite() {
                self.x[j_out] = self.nearest_bound(j_out, 0.0);
            }
            self.pos_of[j_out] = NONE;
            self.basis[leave] = q;
            self.pos_of[q] = leave;

            let mut idx = Vec::new();
            let mut val = Vec::new();
            for (p, &a) in alpha.iter().enumerate() {
                if p != leave && a.abs() > 1e-13 {
                    idx.push(p);
                    val.push(a);
                }
            }
            self.etas.push(Eta { pos: leave, pivot: alpha[leave], idx, val });
            self.alpha = alpha;
        }
    }

    /// Dual simplex from a dual-feasible basis, then a primal pass to confirm.
    fn run_dual(&mut self) -> Option<SolveResult> {
        for j in 0..self.num_cols() {
            self.cost[j] = if j < self.n {
                self.lp.objective[j] / self.cost_scale
            } else {
                0.0
            };
        }
        if !self.refactor() {
            return None;
        }
        // Park every nonbasic column on the bound its reduced cost asks for.
        let tol = self.opts.optimality_tol;
        self.compute_duals();
        for j in 0..self.num_cols() {
            if self.pos_of[j] != NONE || self.lo[j] == self.hi[j] {
                continue;
            }
            let d = self.reduced_cost(j);
            if d < -tol {
                if !self.hi[j].is_finite() {
                    return None;
                }
                self.x[j] = self.hi[j];
            } else if d > tol {
                if !self.lo[j].is_finite() {
                    return None;
                }
                self.x[j] = self.lo[j];
            }
        }
        self.recompute_basic_values();

        let feas_tol = self.opts.feasibility_tol;
        let piv_tol = 1e-9;
        let mut rho = vec![0.0; self.m];
        loop {
            if self.iterations >= self.max_iterations {
                return None;
            }
            if self.iterations % 64 == 0 {
                if let Some(deadline) = self.opts.deadline {
                    if Instant::now() >= deadline {
                        return Some(self.failure(Status::TimeLimit));
                    }
                }
            }
            if self.etas.len() >= self.opts.refactor_every && !self.refactor() {
                return None;
            }
            // Leaving row: largest bound violation.
            let mut leave = NONE;
            let mut worst = 0.0;
            for (p, &j) in self.basis.iter().enumerate() {
                let v = self.x[j];
                let viol = if v < self.lo[j] {
                    self.lo[j] - v
                } else if v > self.hi[j] {
                    v - self.hi[j]
                } else {
                    0.0
                };
                if viol > feas_tol * (1.0 + v.abs()) && viol > worst {
                    worst = viol;
                    leave = p;
                }
            }
            if leave == NONE {
                break;
            }
            let j_out = self.basis[leave];
            let below = self.x[j_out] < self.lo[j_out];
            let target = if below { self.lo[j_out] } else { self.hi[j_out] };

            rho.iter_mut().for_each(|v| *v = 0.0);
            rho[leave] = 1.0;
            self.btran(&mut rho);
            self.compute_duals();

            // Harris two-pass ratio test over the pivot row.
            let mut t_max = f64::INFINITY;
            let mut candidates = Vec::new();
            for j in 0..self.num_cols() {
                if self.pos_of[j] != NONE || self.lo[j] == self.hi[j] {
                    continue;
                }
                let mut a = 0.0;
                for k in self.col_start[j]..self.col_start[j + 1] {
                    a += rho[self.col_idx[k]] * self.col_val[k];
                }
                if a.abs() <= piv_tol {
                    continue;
                }
                let at_upper = self.x[j] >= self.hi[j];
                // x_out = beta - a x_j: raising x_out needs x_j to move against sign(a).
                let eligible = if below {
                    (a < 0.0 && !at_upper) || (a > 0.0 && self.x[j] > self.lo[j])
                } else {
                    (a > 0.0 && !at_upper) || (a < 0.0 && self.x[j] > self.lo[j])
                };
                if !eligible {
                    continue;
                }
                let slack = self.reduced_cost(j).abs();
                t_max = t_max.min((slack + tol) / a.abs());
                candidates.push((j, a, slack));
            }
            if candidates.is_empty() {
                return Some(self.failure(Status::Infeasible));
            }
            let mut q = NONE;
            let mut q_mag = 0.0;
            for &(j, a, slack) in &candidates {
                if slack / a.abs() <= t_max && a.abs() > q_mag {
                    q = j;
                    q_mag = a.abs();
                }
            }
            if q == NONE {
                return None;
            }

            let mut alpha = std::mem::take(&mut self.alpha);
            alpha.iter_mut().for_each(|v| *v = 0.0);
            for k in self.col_start[q]..self.col_start[q + 1] {
                alpha[self.col_idx[k]] = self.col_val[k];
            }
            self.ftran(&mut alpha);
            if alpha[leave].abs() <= piv_tol {
                self.alpha = alpha;
                return None;
            }
            let step = (self.x[j_out] - target) / alpha[leave];
            for p in 0..self.m {
                let a = alpha[p];
                if a != 0.0 {
                    let j = self.basis[p];
                    self.x[j] -= a * step;
                }
            }
            self.x[q] += step;
            self.x[j_out] = target;
            self.pos_of[j_out] = NONE;
            self.basis[leave] = q;
            self.pos_of[q] = leave;
            self.iterations += 1;

            let mut idx = Vec::new();
            let mut val = Vec::new();
            for (p, &a) in alpha.iter().enumerate() {
                if p != leave && a.abs() > 1e-13 {
                    idx.push(p);
                    val.push(a);
                }
            }
            self.etas.push(Eta { pos: leave, pivot: alpha[leave], idx, val });
            self.alpha = alpha;
        }

        self.bland = false;
        self.degenerate_run = 0;
        match self.iterate() {
            Step::Optimal => Some(self.finish()),
            Step::Unbounded => Some(self.failure(Status::Unbounded)),
            Step::TimeLimit => Some(self.failure(Status::TimeLimit)),
            Step::Failed => None,
        }
    }

    fn finish(&mut self) -> SolveResult {
        // Duals in original units.
        for j in 0..self.num_cols() {
            self.cost[j] = if j < self.n { self.lp.objective[j] } else { 0.0 };
        }
        self.compute_duals();
        let solution: Vec<f64> = self.x[..self.n].to_vec();
        let reduced: Vec<f64> = (0..self.n).map(|j| self.reduced_cost(j)).collect();
        let objective = self.lp.evaluate(&solution);
        let mut r = SolveResult::empty(Status::Optimal);
        r.solution = solution;
        r.objective = objective;
        r.best_bound = objective;
        r.gap = 0.0;
        r.simplex_iterations = self.iterations;
        r.duals = Some(self.y.clone());
        r.reduced_costs = Some(reduced);
        debug!(
            "simplex optimal: {} rows, {} cols, {} iterations, lu nnz {}",
            self.m,
            self.n,
            self.iterations,
            self.lu.nonzeros()
        );
        r
    }
}

/// Optimality certificate residuals for an LP solution with duals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    /// Largest bound or row violation.
    pub primal: f64,
    /// Largest reduced cost or dual sign pointing into the feasible region.
    pub dual: f64,
    /// Largest `|d_j| * slack_j` product, over columns and rows.
    pub complementarity: f64,
    /// `|c'x - dual objective|`.
    pub duality_gap: f64,
}

/// Recomputes KKT residuals of `(x, y)` from the problem data alone.
///
/// The dual objective is `b'y + sum_j (d_j^+ l_j - d_j^- u_j)` with `d = c - A'y`,
/// where the positive part of `d_j` is charged to a finite lower bound and the
/// negative part to a finite upper bound.
pub fn kkt_residuals(lp: &LinearProgram, x: &[f64], y: &[f64]) -> KktResiduals {
    let n = lp.num_vars();
    let mut d = lp.objective.clone();
    for (i, row) in lp.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            d[j] -= a * y[i];
        }
    }
    let primal = lp.max_violation(x);
    let act = lp.activities(x);
    let mut dual = 0.0f64;
    let mut comp = 0.0f64;
    let mut dual_obj = 0.0;
    for j in 0..n {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        let dj = d[j];
        if dj > 0.0 {
            if l.is_finite() {
                dual_obj += dj * l;
                comp = comp.max(dj * (x[j] - l).abs());
            } else {
                dual = dual.max(dj);
            }
        } else if dj < 0.0 {
            if u.is_finite() {
                dual_obj += dj * u;
                comp = comp.max(-dj * (u - x[j]).abs());
            } else {
                dual = dual.max(-dj);
            }
        }
    }
    for (i, row) in lp.rows.iter().enumerate() {
        let yi = y[i];
        dual_obj += yi * row.rhs;
        let slack = (row.rhs - act[i]).abs();
        match row.sense {
            Sense::Le => {
                dual = dual.max(yi);
                comp = comp.max(yi.abs() * slack);
            }
            Sense::Ge => {
                dual = dual.max(-yi);
                comp = comp.max(yi.abs() * slack);
            }
            Sense::Eq => {}
        }
    }
    KktResiduals {
        primal,
        dual,
        complementarity: comp,
        duality_gap: (lp.evaluate(x) - dual_obj).abs(),
    }
}
