//! Day-ahead unit-commitment model: instance assembly, MILP formulation,
//! solver-independent cost and feasibility checks, and the solve pipeline.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use ucmarket_milp::{
    simplex_solve_with, BranchAndBound, Limits, LinearProgram, MixedIntegerProgram, PrimalHeuristic, Sense,
    SimplexOptions, SolveResult, Status,
};

use crate::error::{DataError, UcError};
use crate::fleet::{classify_participation, DemandProfile, Fleet, Generator, Participation};
use crate::wind::{farm_power, TurbineCount, TurbinePowerCurve};

/// Absolute tolerance on power residuals (MW).
pub const POWER_TOL: f64 = 1e-4;
/// Relative tolerance on cost comparisons.
pub const COST_REL_TOL: f64 = 1e-6;
/// A binary within this distance of 0 or 1 is rounded.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UcOptions {
    /// Add a zero-cost slack per hour that may spill wind.
    pub allow_wind_curtailment: bool,
    /// Remove price-taker units and subtract their full output from demand.
    pub net_price_takers: bool,
    pub turbine_count: TurbineCount,
}

/// One day of the commitment problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcInstance {
    pub day_label: String,
    pub generators: Vec<Generator>,
    /// Demand seen by the dispatch (MW), after any price-taker netting.
    pub demand: Vec<f64>,
    /// Available wind injection (MW).
    pub wind: Vec<f64>,
    pub wind_capacity: f64,
    pub options: UcOptions,
    /// Units removed by price-taker netting, with the output credited against demand.
    pub netted: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl UcInstance {
    /// Builds an instance from explicit series. Any horizon of at least one hour is accepted.
    pub fn new(generators: Vec<Generator>, demand: Vec<f64>, wind: Vec<f64>, options: UcOptions) -> Result<Self, UcError> {
        let mut inst = UcInstance {
            day_label: String::from("day"),
            generators,
            demand,
            wind,
            wind_capacity: 0.0,
            options,
            netted: Vec::new(),
            warnings: Vec::new(),
        };
        inst.validate()?;
        inst.warnings = inst.excess_wind_warnings();
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), UcError> {
        if self.demand.len() != self.wind.len() {
            return Err(UcError::Dimension(format!(
                "demand has {} hours but wind has {}",
                self.demand.len(),
                self.wind.len()
            )));
        }
        if self.demand.is_empty() {
            return Err(UcError::Dimension("empty horizon".into()));
        }
        if self.generators.is_empty() {
            return Err(DataError::Invalid("instance has no generators".into()).into());
        }
        for g in &self.generators {
            g.validate(&crate::fleet::ValidationOptions { allow_hydro_startup_cost: true })?;
        }
        for (t, (&d, &w)) in self.demand.iter().zip(&self.wind).enumerate() {
            if !(d > 0.0) || !d.is_finite() {
                return Err(DataError::NonPositiveDemand {
                    day: self.day_label.clone(),
                    hour: t,
                    value: d,
                }
                .into());
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(DataError::Invalid(format!("hour {t}: wind injection {w} must be finite and non-negative")).into());
            }
        }
        Ok(())
    }

    fn excess_wind_warnings(&self) -> Vec<String> {
        if self.options.allow_wind_curtailment {
            return Vec::new();
        }
        self.demand
            .iter()
            .zip(&self.wind)
            .enumerate()
            .filter(|(_, (d, w))| w > d)
            .map(|(t, (d, w))| format!("hour {t}: wind {w} MW exceeds demand {d} MW without curtailment; the model is infeasible"))
            .collect()
    }

    pub fn horizon(&self) -> usize {
        self.demand.len()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn total_demand(&self) -> f64 {
        self.demand.iter().sum()
    }
}

/// Assembles the instance for one day at an installed wind capacity (MW).
pub fn build_instance(
    fleet: &Fleet,
    demand: &DemandProfile,
    wind_speeds: &[f64],
    curve: &TurbinePowerCurve,
    capacity: f64,
    options: UcOptions,
) -> Result<UcInstance, UcError> {
    if !(capacity >= 0.0) || !capacity.is_finite() {
        return Err(DataError::Invalid(format!("installed capacity {capacity} must be non-negative")).into());
    }
    if wind_speeds.len() != demand.demand.len() {
        return Err(UcError::Dimension(format!(
            "day {}: demand has {} hours but wind has {}",
            demand.day_label,
            demand.demand.len(),
            wind_speeds.len()
        )));
    }
    let wind = farm_power(wind_speeds, curve, capacity, options.turbine_count);
    let mut load = demand.demand.clone();
    let mut generators = Vec::with_capacity(fleet.len());
    let mut netted = Vec::new();
    for g in &fleet.generators {
        if options.net_price_takers && classify_participation(g) == Participation::PriceTaker {
            for d in load.iter_mut() {
                *d -= g.p_max;
            }
            netted.push((g.id.clone(), g.p_max));
        } else {
            generators.push(g.clone());
        }
    }
    let mut inst = UcInstance {
        day_label: demand.day_label.clone(),
        generators,
        demand: load,
        wind,
        wind_capacity: capacity,
        options,
        netted,
        warnings: Vec::new(),
    };
    inst.validate()?;
    inst.warnings = inst.excess_wind_warnings();
    Ok(inst)
}

/// Column positions of the model variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UcLayout {
    pub generators: usize,
    pub hours: usize,
    pub curtailment: bool,
}

impl UcLayout {
    fn block(&self) -> usize {
        self.generators * self.hours
    }
    pub fn p(&self, g: usize, t: usize) -> usize {
        g * self.hours + t
    }
    pub fn on(&self, g: usize, t: usize) -> usize {
        self.block() + g * self.hours + t
    }
    pub fn start(&self, g: usize, t: usize) -> usize {
        2 * self.block() + g * self.hours + t
    }
    pub fn curtail(&self, t: usize) -> Option<usize> {
        self.curtailment.then(|| 3 * self.block() + t)
    }
    pub fn num_vars(&self) -> usize {
        3 * self.block() + if self.curtailment { self.hours } else { 0 }
    }
}

#[derive(Debug, Clone)]
pub struct UcModel {
    pub mip: MixedIntegerProgram,
    pub layout: UcLayout,
}

/// Formulates the commitment MILP. Ramp rows that can never bind are omitted.
pub fn to_milp(inst: &UcInstance) -> UcModel {
    let (ng, nt) = (inst.num_generators(), inst.horizon());
    let layout = UcLayout {
        generators: ng,
        hours: nt,
        curtailment: inst.options.allow_wind_curtailment,
    };
    let mut lp = LinearProgram::new();
    for (g, gen) in inst.generators.iter().enumerate() {
        for t in 0..nt {
            lp.add_named_var(format!("p[{g},{t}]"), gen.energy_cost, 0.0, gen.p_max);
        }
    }
    let mut mip = MixedIntegerProgram::new(lp);
    for g in 0..ng {
        for t in 0..nt {
            mip.add_binary(format!("on[{g},{t}]"), 0.0);
        }
    }
    for (g, gen) in inst.generators.iter().enumerate() {
        for t in 0..nt {
            mip.add_binary(format!("start[{g},{t}]"), gen.startup_cost);
        }
    }
    if layout.curtailment {
        for t in 0..nt {
            mip.lp.add_named_var(format!("curtail[{t}]"), 0.0, 0.0, inst.wind[t]);
        }
    }
    let lp = &mut mip.lp;

    for t in 0..nt {
        let mut row: Vec<(usize, f64)> = (0..ng).map(|g| (layout.p(g, t), 1.0)).collect();
        if let Some(c) = layout.curtail(t) {
            row.push((c, -1.0));
        }
        lp.add_row(&row, Sense::Eq, inst.demand[t] - inst.wind[t]);
    }

    for (g, gen) in inst.generators.iter().enumerate() {
        for t in 0..nt {
            let (p, on) = (layout.p(g, t), layout.on(g, t));
            lp.add_row(&[(p, 1.0), (on, -gen.p_max)], Sense::Le, 0.0);
            if gen.p_min > 0.0 {
                lp.add_row(&[(p, 1.0), (on, -gen.p_min)], Sense::Ge, 0.0);
            }
        }
    }

    for (g, gen) in inst.generators.iter().enumerate() {
        let p0 = if gen.initial_on { gen.initial_power } else { 0.0 };
        if p0 + gen.ramp_up < gen.p_max {
            lp.add_row(&[(layout.p(g, 0), 1.0)], Sense::Le, p0 + gen.ramp_up);
        }
        if p0 - gen.ramp_down > 0.0 {
            lp.add_row(&[(layout.p(g, 0), 1.0)], Sense::Ge, p0 - gen.ramp_down);
        }
        for t in 1..nt {
            let delta = [(layout.p(g, t), 1.0), (layout.p(g, t - 1), -1.0)];
            if gen.ramp_up < gen.p_max {
                lp.add_row(&delta, Sense::Le, gen.ramp_up);
            }
            if gen.ramp_down < gen.p_max {
                lp.add_row(&delta, Sense::Ge, -gen.ramp_down);
            }
        }
    }

    for (g, gen) in inst.generators.iter().enumerate() {
        let was_on = if gen.initial_on { 1.0 } else { 0.0 };
        for t in 0..nt {
            let (on, st) = (layout.on(g, t), layout.start(g, t));
            if t == 0 {
                lp.add_row(&[(st, 1.0), (on, -1.0)], Sense::Ge, -was_on);
                lp.add_row(&[(st, 1.0)], Sense::Le, 1.0 - was_on);
            } else {
                let prev = layout.on(g, t - 1);
                lp.add_row(&[(st, 1.0), (on, -1.0), (prev, 1.0)], Sense::Ge, 0.0);
                lp.add_row(&[(st, 1.0), (prev, 1.0)], Sense::Le, 1.0);
            }
            lp.add_row(&[(st, 1.0), (on, -1.0)], Sense::Le, 0.0);
        }
    }
    UcModel { mip, layout }
}

/// Commitment and dispatch for one day, indexed `[generator][hour]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcSchedule {
    pub p: Vec<Vec<f64>>,
    pub on: Vec<Vec<bool>>,
    pub startup: Vec<Vec<bool>>,
    pub objective_value: f64,
    pub curtailed_wind: Vec<f64>,
}

impl UcSchedule {
    /// Everything off, no curtailment.
    pub fn all_off(inst: &UcInstance) -> Self {
        let (ng, nt) = (inst.num_generators(), inst.horizon());
        UcSchedule {
            p: vec![vec![0.0; nt]; ng],
            on: vec![vec![false; nt]; ng],
            startup: vec![vec![false; nt]; ng],
            objective_value: 0.0,
            curtailed_wind: vec![0.0; nt],
        }
    }

    /// Derives start-ups from the commitment pattern and initial states.
    pub fn derive_startups(&mut self, inst: &UcInstance) {
        for (g, gen) in inst.generators.iter().enumerate() {
            let mut prev = gen.initial_on;
            for t in 0..self.on[g].len() {
                self.startup[g][t] = self.on[g][t] && !prev;
                prev = self.on[g][t];
            }
        }
    }

    pub fn hours_dispatched(&self, g: usize) -> usize {
        self.p[g].iter().filter(|&&p| p > POWER_TOL).count()
    }
}

fn check_dimensions(inst: &UcInstance, s: &UcSchedule) -> Result<(), UcError> {
    let (ng, nt) = (inst.num_generators(), inst.horizon());
    fn shaped<T>(m: &[Vec<T>], ng: usize, nt: usize) -> bool {
        m.len() == ng && m.iter().all(|r| r.len() == nt)
    }
    if !shaped(&s.p, ng, nt)
        || !shaped(&s.on, ng, nt)
        || !shaped(&s.startup, ng, nt)
        || s.curtailed_wind.len() != nt
    {
        return Err(UcError::Dimension(format!(
            "schedule does not match the instance ({ng} generators x {nt} hours)"
        )));
    }
    Ok(())
}

/// Recomputes the operating cost of a schedule from its dispatch and start-ups.
pub fn evaluate_cost(inst: &UcInstance, s: &UcSchedule) -> Result<f64, UcError> {
    check_dimensions(inst, s)?;
    let mut total = 0.0;
    for (g, gen) in inst.generators.iter().enumerate() {
        for t in 0..inst.horizon() {
            total += gen.energy_cost * s.p[g][t];
            if s.startup[g][t] {
                total += gen.startup_cost;
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintFamily {
    Balance,
    CapacityMax,
    CapacityMin,
    RampUp,
    RampDown,
    /// `startup >= on - on_prev`
    StartupLink,
    /// `startup <= 1 - on_prev`
    StartupWhileOn,
    /// `startup <= on`
    StartupWhileOff,
    Curtailment,
}

impl ConstraintFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintFamily::Balance => "balance",
            ConstraintFamily::CapacityMax => "capacity_max",
            ConstraintFamily::CapacityMin => "capacity_min",
            ConstraintFamily::RampUp => "ramp_up",
            ConstraintFamily::RampDown => "ramp_down",
            ConstraintFamily::StartupLink => "startup_link",
            ConstraintFamily::StartupWhileOn => "startup_while_on",
            ConstraintFamily::StartupWhileOff => "startup_while_off",
            ConstraintFamily::Curtailment => "curtailment",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub family: ConstraintFamily,
    /// Generator id; `None` for system-wide rows.
    pub generator: Option<String>,
    pub hour: usize,
    pub magnitude: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.generator {
            Some(g) => write!(f, "{} at unit {g}, hour {}: {}", self.family.as_str(), self.hour, self.magnitude),
            None => write!(f, "{} at hour {}: {}", self.family.as_str(), self.hour, self.magnitude),
        }
    }
}

/// Lists every constraint the schedule breaks by more than [`POWER_TOL`].
pub fn check_feasibility(inst: &UcInstance, s: &UcSchedule) -> Result<Vec<Violation>, UcError> {
    check_dimensions(inst, s)?;
    let nt = inst.horizon();
    let mut out = Vec::new();
    let mut push = |family, generator: Option<&Generator>, hour, magnitude: f64| {
        if magnitude > POWER_TOL {
            out.push(Violation {
                family,
                generator: generator.map(|g| g.id.clone()),
                hour,
                magnitude,
            });
        }
    };
    for t in 0..nt {
        let supply: f64 = s.p.iter().map(|row| row[t]).sum::<f64>() + inst.wind[t] - s.curtailed_wind[t];
        push(ConstraintFamily::Balance, None, t, (supply - inst.demand[t]).abs());
        let c = s.curtailed_wind[t];
        let excess = if inst.options.allow_wind_curtailment {
            (-c).max(c - inst.wind[t])
        } else {
            c.abs()
        };
        push(ConstraintFamily::Curtailment, None, t, excess);
    }
    for (g, gen) in inst.generators.iter().enumerate() {
        let mut prev_p = if gen.initial_on { gen.initial_power } else { 0.0 };
        let mut prev_on = gen.initial_on;
        for t in 0..nt {
            let p = s.p[g][t];
            let on = if s.on[g][t] { 1.0 } else { 0.0 };
            push(ConstraintFamily::CapacityMax, Some(gen), t, p - on * gen.p_max);
            push(ConstraintFamily::CapacityMin, Some(gen), t, on * gen.p_min - p);
            push(ConstraintFamily::RampUp, Some(gen), t, p - prev_p - gen.ramp_up);
            push(ConstraintFamily::RampDown, Some(gen), t, prev_p - p - gen.ramp_down);
            let (on_b, st) = (s.on[g][t], s.startup[g][t]);
            if on_b && !prev_on && !st {
                push(ConstraintFamily::StartupLink, Some(gen), t, 1.0);
            }
            if st && prev_on {
                push(ConstraintFamily::StartupWhileOn, Some(gen), t, 1.0);
            }
            if st && !on_b {
                push(ConstraintFamily::StartupWhileOff, Some(gen), t, 1.0);
            }
            prev_p = p;
            prev_on = on_b;
        }
    }
    Ok(out)
}

/// Reads a schedule out of a MILP solution vector. Binaries must be within
/// [`INTEGRALITY_TOL`] of 0 or 1.
pub fn extract_schedule(inst: &UcInstance, layout: &UcLayout, x: &[f64], objective: f64) -> Result<UcSchedule, UcError> {
    if x.len() != layout.num_vars() {
        return Err(UcError::Dimension(format!("solution has {} entries, model has {}", x.len(), layout.num_vars())));
    }
    let binary = |j: usize| -> Result<bool, UcError> {
        let v = x[j];
        if (v - v.round()).abs() > INTEGRALITY_TOL {
            return Err(UcError::Fractional { var: j, value: v });
        }
        Ok(v.round() >= 1.0)
    };
    let mut s = UcSchedule::all_off(inst);
    for g in 0..layout.generators {
        for t in 0..layout.hours {
            s.p[g][t] = x[layout.p(g, t)];
            s.on[g][t] = binary(layout.on(g, t))?;
            s.startup[g][t] = binary(layout.start(g, t))?;
        }
    }
    for t in 0..layout.hours {
        if let Some(c) = layout.curtail(t) {
            s.curtailed_wind[t] = x[c];
        }
    }
    s.objective_value = objective;
    Ok(s)
}

/// Settings for [`solve_uc_with`].
#[derive(Debug, Clone)]
pub struct UcSolveOptions {
    pub limits: Limits,
    /// Round relaxations into commitment patterns and re-dispatch them.
    pub rounding_heuristic: bool,
    /// Fix `on = 1` for units with neither start-up cost nor minimum output,
    /// and report their status from dispatch afterwards. This never changes
    /// the optimal cost.
    pub fix_free_units: bool,
    /// Thresholds tried by the rounding heuristic.
    pub rounding_thresholds: Vec<f64>,
    pub heuristic_interval: usize,
}

impl Default for UcSolveOptions {
    fn default() -> Self {
        UcSolveOptions {
            limits: Limits::default(),
            rounding_heuristic: true,
            fix_free_units: true,
            rounding_thresholds: vec![1e-6, 0.1, 0.5],
            heuristic_interval: 16,
        }
    }
}

impl UcSolveOptions {
    pub fn with_limits(limits: Limits) -> Self {
        UcSolveOptions { limits, ..Default::default() }
    }
}

struct Rounding<'a> {
    inst: &'a UcInstance,
    layout: UcLayout,
    thresholds: &'a [f64],
    deadline: Instant,
}

impl Rounding<'_> {
    fn fix_pattern(&self, lp: &mut LinearProgram, on: &[Vec<bool>]) {
        for (g, gen) in self.inst.generators.iter().enumerate() {
            let mut prev = gen.initial_on;
            for (t, &o) in on[g].iter().enumerate() {
                let v = if o { 1.0 } else { 0.0 };
                let s = if o && !prev { 1.0 } else { 0.0 };
                let (j, k) = (self.layout.on(g, t), self.layout.start(g, t));
                lp.lower[j] = v;
                lp.upper[j] = v;
                lp.lower[k] = s;
                lp.upper[k] = s;
                prev = o;
            }
        }
    }
}

impl PrimalHeuristic for Rounding<'_> {
    fn propose(&self, mip: &MixedIntegerProgram, relaxation: &[f64]) -> Option<Vec<f64>> {
        let opts = SimplexOptions {
            deadline: Some(self.deadline),
            ..SimplexOptions::default()
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut tried: Vec<Vec<Vec<bool>>> = Vec::new();
        for &thr in self.thresholds {
            if Instant::now() >= self.deadline {
                break;
            }
            let on: Vec<Vec<bool>> = (0..self.layout.generators)
                .map(|g| {
                    (0..self.layout.hours)
                        .map(|t| {
                            let j = self.layout.on(g, t);
                            mip.lp.lower[j] >= 1.0 || relaxation[j] > thr
                        })
                        .collect()
                })
                .collect();
            if tried.contains(&on) {
                continue;
            }
            let mut lp = mip.lp.clone();
            self.fix_pattern(&mut lp, &on);
            tried.push(on);
            let Ok(r) = simplex_solve_with(&lp, &opts) else {
                continue;
            };
            if r.status == Status::Optimal && best.as_ref().map_or(true, |(b, _)| r.objective < *b) {
                best = Some((r.objective, r.solution));
            }
        }
        best.map(|(_, x)| x)
    }
}

/// Solves with default options; see [`solve_uc_with`].
pub fn solve_uc(inst: &UcInstance, limits: &Limits) -> Result<(SolveResult, UcSchedule), UcError> {
    solve_uc_with(inst, &UcSolveOptions::with_limits(limits.clone()))
}

/// Formulates, solves and extracts a schedule, then re-checks it against the
/// instance. Returns [`UcError::NoSolution`] when the solver ends without an incumbent.
pub fn solve_uc_with(inst: &UcInstance, opts: &UcSolveOptions) -> Result<(SolveResult, UcSchedule), UcError> {
    inst.validate()?;
    let UcModel { mut mip, layout } = to_milp(inst);
    let free: Vec<bool> = inst
        .generators
        .iter()
        .map(|g| opts.fix_free_units && g.startup_cost == 0.0 && g.p_min == 0.0)
        .collect();
    for (g, _) in free.iter().enumerate().filter(|(_, f)| **f) {
        for t in 0..layout.hours {
            mip.lp.lower[layout.on(g, t)] = 1.0;
        }
    }
    let deadline = Instant::now() + opts.limits.time_limit.min(Duration::from_secs(365 * 24 * 3600));
    let rounding = Rounding {
        inst,
        layout,
        thresholds: &opts.rounding_thresholds,
        deadline,
    };
    let mut bnb = BranchAndBound::new(&mip, opts.limits.clone()).heuristic_interval(opts.heuristic_interval);
    if opts.rounding_heuristic {
        bnb = bnb.with_heuristic(&rounding);
    }
    let result = bnb.solve()?;
    if !result.has_solution() {
        return Err(UcError::NoSolution { status: result.status });
    }
    let mut sched = extract_schedule(inst, &layout, &result.solution, result.objective)?;
    if free.iter().any(|&f| f) {
        for (g, _) in free.iter().enumerate().filter(|(_, f)| **f) {
            for t in 0..layout.hours {
                sched.on[g][t] = sched.p[g][t] > 0.0;
            }
        }
        sched.derive_startups(inst);
    }
    let violations = check_feasibility(inst, &sched)?;
    if let Some(first) = violations.first() {
        return Err(UcError::Infeasible {
            count: violations.len(),
            first: first.to_string(),
        });
    }
    Ok((result, sched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fleet::Technology;

    fn unit(id: &str, p_max: f64, ramp: f64, cost: f64, su: f64) -> Generator {
        Generator::new(id, Technology::Gas, p_max, ramp, cost, su)
    }

    fn inst(gens: Vec<Generator>, demand: Vec<f64>) -> UcInstance {
        let n = demand.len();
        UcInstance::new(gens, demand, vec![0.0; n], UcOptions::default()).unwrap()
    }

    #[test]
    fn one_unit_two_hours_shape() {
        let i = inst(vec![unit("a", 100.0, 100.0, 10.0, 5.0)], vec![10.0, 20.0]);
        let m = to_milp(&i);
        let binaries = m.mip.binaries.len();
        assert_eq!(m.mip.lp.num_vars() - binaries, 2);
        assert_eq!(binaries, 4);
        let balance = m.mip.lp.rows.iter().filter(|r| r.sense == Sense::Eq).count();
        assert_eq!(balance, 2);
    }

    #[test]
    fn zero_startup_costs_leave_no_start_terms() {
        let i = inst(vec![unit("a", 100.0, 100.0, 10.0, 0.0), unit("b", 50.0, 5.0, 3.0, 0.0)], vec![10.0; 3]);
        let m = to_milp(&i);
        for g in 0..2 {
            for t in 0..3 {
                assert_eq!(m.mip.lp.objective[m.layout.start(g, t)], 0.0);
            }
        }
    }

    #[test]
    fn curtailment_adds_one_slack_per_hour() {
        let mut i = inst(vec![unit("a", 100.0, 100.0, 10.0, 0.0)], vec![10.0; 4]);
        let base = to_milp(&i).mip.lp.num_vars();
        i.options.allow_wind_curtailment = true;
        let m = to_milp(&i);
        assert_eq!(m.mip.lp.num_vars(), base + 4);
        for t in 0..4 {
            let c = m.layout.curtail(t).unwrap();
            assert_eq!(m.mip.lp.objective[c], 0.0);
            assert_eq!(m.mip.lp.lower[c], 0.0);
        }
    }

    #[test]
    fn cost_of_initially_on_unit() {
        let mut g = unit("a", 100.0, 100.0, 10.0, 500.0);
        g.initial_on = true;
        g.initial_power = 50.0;
        let i = inst(vec![g], vec![50.0, 60.0]);
        let mut s = UcSchedule::all_off(&i);
        s.p[0] = vec![50.0, 60.0];
        s.on[0] = vec![true, true];
        assert_eq!(evaluate_cost(&i, &s).unwrap(), 1100.0);
        assert!(check_feasibility(&i, &s).unwrap().is_empty());
    }

    #[test]
    fn cost_of_all_off_and_single_startup() {
        let i = inst(vec![unit("47", 30.0, 6.0, 37_000.0, 2_889_885.0)], vec![1.0, 1.0]);
        let mut s = UcSchedule::all_off(&i);
        assert_eq!(evaluate_cost(&i, &s).unwrap(), 0.0);
        s.on[0][1] = true;
        s.startup[0][1] = true;
        assert_eq!(evaluate_cost(&i, &s).unwrap(), 2_889_885.0);
    }

    #[test]
    fn dispatch_while_off_is_a_bounds_violation() {
        let i = inst(vec![unit("a", 100.0, 100.0, 1.0, 0.0)], vec![10.0]);
        let mut s = UcSchedule::all_off(&i);
        s.p[0][0] = 10.0;
        let v = check_feasibility(&i, &s).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].family, ConstraintFamily::CapacityMax);
        assert_eq!(v[0].magnitude, 10.0);
    }

    #[test]
    fn ramp_jump_violation() {
        let i = inst(vec![unit("a", 100.0, 10.0, 1.0, 0.0)], vec![10.0, 30.0]);
        let mut s = UcSchedule::all_off(&i);
        s.p[0] = vec![10.0, 30.0];
        s.on[0] = vec![true, true];
        s.startup[0][0] = true;
        let v = check_feasibility(&i, &s).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].family, ConstraintFamily::RampUp);
        assert_eq!(v[0].hour, 1);
        assert_eq!(v[0].magnitude, 10.0);
    }

    #[test]
    fn mismatched_horizons_rejected() {
        let r = UcInstance::new(vec![unit("a", 1.0, 1.0, 1.0, 0.0)], vec![1.0; 3], vec![0.0; 2], UcOptions::default());
        assert!(matches!(r, Err(UcError::Dimension(_))));
    }

    #[test]
    fn cheap_unit_covers_demand() {
        let i = inst(vec![unit("a", 500.0, 500.0, 7.0, 0.0)], vec![100.0, 200.0, 150.0]);
        let (r, s) = solve_uc(&i, &Limits::default()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(s.p[0], vec![100.0, 200.0, 150.0]);
        assert!((r.objective - 7.0 * 450.0).abs() < 1e-9);
        assert_eq!(s.on[0], vec![true, true, true]);
        assert_eq!(s.startup[0], vec![true, false, false]);
    }

    #[test]
    fn peaker_amortisation() {
        let mut base = Generator::new("base", Technology::Hydro, 100.0, 100.0, 50.0, 0.0);
        base.name = "base".into();
        let peaker = unit("peaker", 100.0, 100.0, 10.0, 1000.0);
        let i = inst(vec![base, peaker], vec![50.0, 150.0, 50.0]);
        let (r, s) = solve_uc(&i, &Limits::default()).unwrap();
        // one start, peaker carries 200 MWh and base the remaining 50
        assert!((r.objective - 5500.0).abs() < 1e-6, "{}", r.objective);
        assert_eq!(s.startup[1].iter().filter(|&&b| b).count(), 1);
    }

    #[test]
    fn infeasible_when_demand_exceeds_fleet() {
        let i = inst(vec![unit("a", 10.0, 10.0, 1.0, 0.0)], vec![20.0]);
        match solve_uc(&i, &Limits::default()) {
            Err(UcError::NoSolution { status }) => assert_eq!(status, Status::Infeasible),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn excess_wind_is_flagged() {
        let i = UcInstance::new(vec![unit("a", 10.0, 10.0, 1.0, 0.0)], vec![5.0], vec![8.0], UcOptions::default()).unwrap();
        assert_eq!(i.warnings.len(), 1);
        let mut opts = UcOptions::default();
        opts.allow_wind_curtailment = true;
        let i = UcInstance::new(vec![unit("a", 10.0, 10.0, 1.0, 0.0)], vec![5.0], vec![8.0], opts).unwrap();
        assert!(i.warnings.is_empty());
        let (_, s) = solve_uc(&i, &Limits::default()).unwrap();
        assert!((s.curtailed_wind[0] - 3.0).abs() < 1e-9);
    }
}
