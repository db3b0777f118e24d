//! Exhaustive search over commitment patterns.
//!
//! For each on/off pattern the start-ups follow directly, and the remaining
//! dispatch problem is an LP in `p` (and curtailment) built here from the
//! instance data, not from the solver's formulation.

use ucmarket::uc::UcInstance;
use ucmarket_milp::{LinearProgram, Sense};

use crate::tableau::{self, Outcome};

/// Largest `generators * hours` accepted (2^16 patterns).
pub const MAX_BINARIES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Best {
    pub objective: f64,
    /// `[generator][hour]`
    pub on: Vec<Vec<bool>>,
    pub p: Vec<Vec<f64>>,
}

/// Optimal cost over all patterns, or `None` when every pattern is infeasible.
pub fn uc_optimum(inst: &UcInstance) -> Option<Best> {
    let (ng, nt) = (inst.generators.len(), inst.demand.len());
    let bits = ng * nt;
    assert!(bits <= MAX_BINARIES, "{bits} binaries is too many to enumerate");
    let mut best: Option<Best> = None;
    for mask in 0u64..(1u64 << bits) {
        let on: Vec<Vec<bool>> = (0..ng)
            .map(|g| (0..nt).map(|t| mask >> (g * nt + t) & 1 == 1).collect())
            .collect();
        if let Some((objective, p)) = dispatch(inst, &on) {
            if best.as_ref().map_or(true, |b| objective < b.objective) {
                best = Some(Best { objective, on, p });
            }
        }
    }
    best
}

/// Start-up cost of a pattern plus the optimal dispatch cost under it.
pub fn dispatch(inst: &UcInstance, on: &[Vec<bool>]) -> Option<(f64, Vec<Vec<f64>>)> {
    let (ng, nt) = (inst.generators.len(), inst.demand.len());
    let mut startup_cost = 0.0;
    for (g, gen) in inst.generators.iter().enumerate() {
        let mut prev = gen.initial_on;
        for t in 0..nt {
            if on[g][t] && !prev {
                startup_cost += gen.startup_cost;
            }
            prev = on[g][t];
        }
    }
    let mut lp = LinearProgram::new();
    let idx = |g: usize, t: usize| g * nt + t;
    for (g, gen) in inst.generators.iter().enumerate() {
        for t in 0..nt {
            let (lo, hi) = if on[g][t] { (gen.p_min, gen.p_max) } else { (0.0, 0.0) };
            lp.add_var(gen.energy_cost, lo, hi);
        }
    }
    let curtail: Vec<Option<usize>> = (0..nt)
        .map(|t| {
            inst.options
                .allow_wind_curtailment
                .then(|| lp.add_var(0.0, 0.0, inst.wind[t]))
        })
        .collect();
    for t in 0..nt {
        let mut row: Vec<(usize, f64)> = (0..ng).map(|g| (idx(g, t), 1.0)).collect();
        if let Some(c) = curtail[t] {
            row.push((c, -1.0));
        }
        lp.add_row(&row, Sense::Eq, inst.demand[t] - inst.wind[t]);
    }
    for (g, gen) in inst.generators.iter().enumerate() {
        let p0 = if gen.initial_on { gen.initial_power } else { 0.0 };
        lp.add_row(&[(idx(g, 0), 1.0)], Sense::Le, p0 + gen.ramp_up);
        lp.add_row(&[(idx(g, 0), 1.0)], Sense::Ge, p0 - gen.ramp_down);
        for t in 1..nt {
            lp.add_row(&[(idx(g, t), 1.0), (idx(g, t - 1), -1.0)], Sense::Le, gen.ramp_up);
            lp.add_row(&[(idx(g, t), 1.0), (idx(g, t - 1), -1.0)], Sense::Ge, -gen.ramp_down);
        }
    }
    match tableau::solve(&lp) {
        Outcome::Optimal { x, objective } => {
            let p = (0..ng).map(|g| (0..nt).map(|t| x[idx(g, t)]).collect()).collect();
            Some((objective + startup_cost, p))
        }
        Outcome::Infeasible => None,
        Outcome::Unbounded => unreachable!("dispatch variables are bounded"),
    }
}
