//! Capacity sweeps and the aggregations computed over them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DataError, UcError};
use crate::fleet::{DemandProfile, Fleet, Technology};
use crate::pricing::{price, settle, wind_delivered, PriceReport, SettlementReport, UpliftConvention};
use crate::uc::{build_instance, solve_uc_with, UcOptions, UcSolveOptions, POWER_TOL};
use crate::wind::{TurbinePowerCurve, WindSpeedSeries};

/// Installed capacities 0..=1000 MW every 50 MW, with 505.5 MW inserted.
pub fn default_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=20).map(|k| k as f64 * 50.0).collect();
    grid.push(505.5);
    grid.sort_by(f64::total_cmp);
    grid
}

pub fn validate_grid(grid: &[f64]) -> Result<(), DataError> {
    if grid.is_empty() {
        return Err(DataError::Invalid("capacity grid is empty".into()));
    }
    if let Some(c) = grid.iter().find(|c| !(**c >= 0.0) || !c.is_finite()) {
        return Err(DataError::Invalid(format!("capacity {c} must be finite and non-negative")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DataError::Invalid("capacity grid must be strictly increasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub grid: Vec<f64>,
    pub uc: UcOptions,
    pub solve: UcSolveOptions,
    pub convention: UpliftConvention,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            grid: default_grid(),
            uc: UcOptions::default(),
            solve: UcSolveOptions::default(),
            convention: UpliftConvention::default(),
            jobs: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSummary {
    pub id: String,
    pub tech: Technology,
    pub energy: f64,
    pub hours: usize,
    pub net_revenue: f64,
}

/// Outcome of one (day, capacity) solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub day: String,
    pub capacity: f64,
    /// Solver status, or `error` when the cell could not be built or priced.
    pub status: String,
    pub message: Option<String>,
    pub objective: Option<f64>,
    pub gap: Option<f64>,
    pub nodes: usize,
    pub total_demand: f64,
    pub prices: Option<PriceReport>,
    pub settlement: Option<SettlementReport>,
    /// Energy by technology (MWh), wind included.
    pub energy_by_tech: BTreeMap<Technology, f64>,
    pub units: Vec<UnitSummary>,
}

impl Cell {
    pub fn is_solved(&self) -> bool {
        self.objective.is_some() && self.prices.is_some()
    }

    /// Objective over total daily energy (COP/MWh).
    pub fn average_cost(&self) -> Option<f64> {
        self.objective.map(|o| o / self.total_demand)
    }

    pub fn shares(&self) -> BTreeMap<Technology, f64> {
        let total: f64 = self.energy_by_tech.values().sum();
        self.energy_by_tech
            .iter()
            .map(|(t, e)| (*t, if total > 0.0 { e / total } else { 0.0 }))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub days: Vec<String>,
    pub convention: UpliftConvention,
    /// Day-major: `cells[d * grid.len() + k]`.
    pub cells: Vec<Cell>,
}

impl SweepResult {
    pub fn cell(&self, day: usize, k: usize) -> &Cell {
        &self.cells[day * self.grid.len() + k]
    }

    pub fn at_capacity(&self, k: usize) -> impl Iterator<Item = &Cell> + '_ {
        (0..self.days.len()).map(move |d| self.cell(d, k))
    }

    pub fn failed(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_solved()).count()
    }
}

fn solve_cell(
    fleet: &Fleet,
    demand: &DemandProfile,
    speeds: &[f64],
    curve: &TurbinePowerCurve,
    capacity: f64,
    cfg: &SweepConfig,
) -> Cell {
    let mut cell = Cell {
        day: demand.day_label.clone(),
        capacity,
        status: "error".into(),
        message: None,
        objective: None,
        gap: None,
        nodes: 0,
        total_demand: demand.total(),
        prices: None,
        settlement: None,
        energy_by_tech: BTreeMap::new(),
        units: Vec::new(),
    };
    let inst = match build_instance(fleet, demand, speeds, curve, capacity, cfg.uc) {
        Ok(i) => i,
        Err(e) => {
            cell.message = Some(e.to_string());
            return cell;
        }
    };
    cell.total_demand = inst.total_demand();
    let (result, sched) = match solve_uc_with(&inst, &cfg.solve) {
        Ok(r) => r,
        Err(e) => {
            if let UcError::NoSolution { status } = &e {
                cell.status = status.as_str().to_string();
            }
            cell.message = Some(e.to_string());
            return cell;
        }
    };
    cell.status = result.status.as_str().to_string();
    cell.nodes = result.nodes;
    let prices = match price(&inst, &sched, cfg.convention) {
        Ok(p) => p,
        Err(e) => {
            cell.message = Some(e.to_string());
            return cell;
        }
    };
    let settlement = match settle(&inst, &sched, &prices) {
        Ok(s) => s,
        Err(e) => {
            cell.message = Some(e.to_string());
            return cell;
        }
    };
    let mut energy: BTreeMap<Technology, f64> = Technology::ALL.iter().map(|t| (*t, 0.0)).collect();
    for (g, gen) in inst.generators.iter().enumerate() {
        let e: f64 = sched.p[g].iter().sum();
        *energy.entry(gen.tech).or_default() += e;
        cell.units.push(UnitSummary {
            id: gen.id.clone(),
            tech: gen.tech,
            energy: e,
            hours: sched.p[g].iter().filter(|&&p| p > POWER_TOL).count(),
            net_revenue: settlement.units[g].net_revenue,
        });
    }
    for (id, p) in &inst.netted {
        if let Some(g) = fleet.generators.iter().find(|g| &g.id == id) {
            *energy.entry(g.tech).or_default() += p * inst.horizon() as f64;
        }
    }
    *energy.entry(Technology::Wind).or_default() += wind_delivered(&inst, &sched).iter().sum::<f64>();
    cell.energy_by_tech = energy;
    cell.objective = Some(result.objective);
    cell.gap = Some(result.gap);
    cell.prices = Some(prices);
    cell.settlement = Some(settlement);
    cell
}

/// Solves every (day, capacity) pair independently. Cell failures are recorded,
/// never fatal; the returned cells are in day-major order regardless of `jobs`.
pub fn run_sweep(
    fleet: &Fleet,
    demand_days: &[DemandProfile],
    wind: &WindSpeedSeries,
    curve: &TurbinePowerCurve,
    cfg: &SweepConfig,
) -> Result<SweepResult, DataError> {
    validate_grid(&cfg.grid)?;
    if demand_days.is_empty() {
        return Err(DataError::Invalid("no demand days".into()));
    }
    let mut speeds = Vec::with_capacity(demand_days.len());
    for d in demand_days {
        let s = wind
            .day(&d.day_label)
            .ok_or_else(|| DataError::Invalid(format!("day {} has no wind record", d.day_label)))?;
        speeds.push(s);
    }
    let jobs: Vec<(usize, usize)> = (0..demand_days.len())
        .flat_map(|d| (0..cfg.grid.len()).map(move |k| (d, k)))
        .collect();
    let work = || -> Vec<Cell> {
        jobs.par_iter()
            .map(|&(d, k)| solve_cell(fleet, &demand_days[d], speeds[d], curve, cfg.grid[k], cfg))
            .collect()
    };
    let cells = if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| DataError::Invalid(format!("cannot start worker pool: {e}")))?
            .install(work)
    } else {
        work()
    };
    Ok(SweepResult {
        grid: cfg.grid.clone(),
        days: demand_days.iter().map(|d| d.day_label.clone()).collect(),
        convention: cfg.convention,
        cells,
    })
}

/// Count, extremes, mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub std_dev: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_dev = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Summary {
            n,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            mean,
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            std_dev,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityStats {
    pub capacity: f64,
    pub stats: Summary,
}

/// Average generation cost (COP/MWh) across days at each capacity. Capacities
/// with no solved cell are left out with a warning.
pub fn avg_daily_cost(sweep: &SweepResult) -> Vec<CapacityStats> {
    per_capacity(sweep, |c| c.average_cost())
}

/// Day-mean spot price (COP/MWh) across days at each capacity.
pub fn mean_spot_price(sweep: &SweepResult) -> Vec<CapacityStats> {
    per_capacity(sweep, |c| {
        c.prices
            .as_ref()
            .map(|p| p.spot.iter().sum::<f64>() / p.spot.len() as f64)
    })
}

fn per_capacity(sweep: &SweepResult, metric: impl Fn(&Cell) -> Option<f64>) -> Vec<CapacityStats> {
    let mut out = Vec::new();
    for (k, &capacity) in sweep.grid.iter().enumerate() {
        let values: Vec<f64> = sweep.at_capacity(k).filter(|c| c.is_solved()).filter_map(&metric).collect();
        match Summary::of(&values) {
            Some(stats) => out.push(CapacityStats { capacity, stats }),
            None => log::warn!("capacity {capacity} MW has no solved cell; left out"),
        }
    }
    out
}

/// Hour-by-hour spot price averaged over days, one row per capacity.
pub fn hourly_spot_profile(sweep: &SweepResult) -> Vec<(f64, Vec<f64>)> {
    let mut out = Vec::new();
    for (k, &capacity) in sweep.grid.iter().enumerate() {
        let solved: Vec<&PriceReport> = sweep.at_capacity(k).filter_map(|c| c.prices.as_ref()).collect();
        if solved.is_empty() {
            continue;
        }
        let hours = solved[0].spot.len();
        let profile = (0..hours)
            .map(|t| solved.iter().map(|p| p.spot[t]).sum::<f64>() / solved.len() as f64)
            .collect();
        out.push((capacity, profile));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareBreakdown {
    pub capacity: f64,
    /// Mean and sample standard deviation of each technology's share of daily energy.
    pub shares: BTreeMap<Technology, (f64, f64)>,
}

pub fn share_by_type(sweep: &SweepResult) -> Vec<ShareBreakdown> {
    let mut out = Vec::new();
    for (k, &capacity) in sweep.grid.iter().enumerate() {
        let cells: Vec<BTreeMap<Technology, f64>> = sweep.at_capacity(k).filter(|c| c.is_solved()).map(Cell::shares).collect();
        if cells.is_empty() {
            continue;
        }
        let shares = Technology::ALL
            .iter()
            .map(|t| {
                let v: Vec<f64> = cells.iter().map(|s| s.get(t).copied().unwrap_or(0.0)).collect();
                let s = Summary::of(&v).expect("non-empty");
                (*t, (s.mean, s.std_dev))
            })
            .collect();
        out.push(ShareBreakdown { capacity, shares });
    }
    out
}

/// Mean share at each capacity minus the mean share at the first grid point.
pub fn share_change(breakdown: &[ShareBreakdown]) -> Vec<(f64, BTreeMap<Technology, f64>)> {
    let Some(base) = breakdown.first() else {
        return Vec::new();
    };
    breakdown
        .iter()
        .map(|b| {
            let delta = b
                .shares
                .iter()
                .map(|(t, (m, _))| (*t, m - base.shares.get(t).map_or(0.0, |s| s.0)))
                .collect();
            (b.capacity, delta)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub capacity: f64,
    /// Mean operating hours per solved day.
    pub hours: f64,
    /// Mean net revenue per solved day (COP).
    pub net_revenue: f64,
    /// Net revenue over its value at capacity 0; absent without a non-zero baseline.
    pub relative_revenue: Option<f64>,
}

/// Operating hours and revenue of one unit across the grid.
pub fn unit_trajectory(sweep: &SweepResult, generator_id: &str) -> Result<Vec<TrajectoryPoint>, DataError> {
    let known = sweep
        .cells
        .iter()
        .any(|c| c.units.iter().any(|u| u.id == generator_id));
    if !known {
        return Err(DataError::Invalid(format!("unknown generator id {generator_id:?}")));
    }
    let mut points = Vec::new();
    for (k, &capacity) in sweep.grid.iter().enumerate() {
        let rows: Vec<&UnitSummary> = sweep
            .at_capacity(k)
            .filter(|c| c.is_solved())
            .filter_map(|c| c.units.iter().find(|u| u.id == generator_id))
            .collect();
        if rows.is_empty() {
            continue;
        }
        let n = rows.len() as f64;
        points.push(TrajectoryPoint {
            capacity,
            hours: rows.iter().map(|u| u.hours as f64).sum::<f64>() / n,
            net_revenue: rows.iter().map(|u| u.net_revenue).sum::<f64>() / n,
            relative_revenue: None,
        });
    }
    let baseline = points.iter().find(|p| p.capacity == 0.0).map(|p| p.net_revenue);
    if let Some(b) = baseline.filter(|b| *b != 0.0) {
        for p in &mut points {
            p.relative_revenue = Some(p.net_revenue / b);
        }
    }
    Ok(points)
}
