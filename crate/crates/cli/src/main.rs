//! `ucmarket`: solve single market days, sweep installed wind capacity, and
//! summarise wind-speed data.

mod config;
mod failure;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde_json::json;
use ucmarket::analytics::{avg_daily_cost, run_sweep, SweepConfig};
use ucmarket::fleet::write_demand_csv;
use ucmarket::synthetic::{demand_days, wind_days, DemandShape, DEFAULT_DAYS, DEFAULT_SEED};
use ucmarket::uc::{solve_uc_with, UcOptions, UcSolveOptions};
use ucmarket::wind::{histogram, summarize_series, write_wind_csv};
use ucmarket::{
    build_instance, check_feasibility, data, load_curve, load_demand, load_fleet, price, report, settle, DemandProfile, Fleet,
    FleetFormat, TurbinePowerCurve, UpliftConvention, WindSpeedSeries,
};
use ucmarket_milp::Limits;

use config::{parse_grid, RunFile};
use failure::{Failure, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "ucmarket", version, about = "Day-ahead unit commitment and spot pricing with wind")]
struct Cli {
    /// Run file with `key = value` lines; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Log progress (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve, price and settle one day at one installed wind capacity.
    Solve(SolveArgs),
    /// Solve every day at every capacity of a grid and write the aggregates.
    Sweep(SweepArgs),
    /// Summary statistics and histogram of a wind-speed series.
    Windstats(WindstatsArgs),
    /// Load and check all inputs without solving.
    Validate(DataArgs),
    /// Write a seeded synthetic demand and wind day set.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Dataset {
    /// 12-unit fleet with matching demand days.
    Desk,
    /// 51-unit fleet with matching demand days.
    Appendix,
}

impl std::str::FromStr for Dataset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Dataset as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args, Debug, Clone)]
struct DataArgs {
    /// Bundled data used for any input not given as a file [default: desk].
    #[arg(long)]
    dataset: Option<Dataset>,
    /// Fleet file (.csv or .json).
    #[arg(long, value_name = "FILE")]
    fleet: Option<PathBuf>,
    /// Demand day table (CSV, one row per day).
    #[arg(long, value_name = "FILE")]
    demand: Option<PathBuf>,
    /// Hourly wind-speed day table (CSV, m/s).
    #[arg(long, value_name = "FILE")]
    wind: Option<PathBuf>,
    /// Turbine power curve (CSV).
    #[arg(long, value_name = "FILE")]
    curve: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Wall-clock limit per solve, in seconds [default: 60].
    #[arg(long, value_name = "SECONDS")]
    time_limit: Option<f64>,
    /// Relative optimality gap at which a solve stops [default: 1e-4].
    #[arg(long, value_name = "GAP")]
    mip_gap: Option<f64>,
    /// Cost gap that feeds the uplift: make-whole or as-printed [default: make-whole].
    #[arg(long, value_name = "CONVENTION")]
    uplift_convention: Option<UpliftConvention>,
    /// Allow wind to be spilled when it exceeds demand.
    #[arg(long)]
    curtailment: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Day label [default: first demand day].
    #[arg(long)]
    day: Option<String>,
    /// Installed wind capacity in MW [default: 0].
    #[arg(long, value_name = "MW")]
    capacity: Option<f64>,
    /// Output directory [default: out].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Capacities in MW: comma-separated values and start:end:step ranges
    /// [default: 0:1000:50,505.5].
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Worker threads; 0 uses one per core [default: 0].
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory [default: out].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WindstatsArgs {
    /// Hourly wind-speed day table (CSV, m/s) [default: bundled].
    #[arg(long, value_name = "FILE")]
    wind: Option<PathBuf>,
    /// Histogram bin width in m/s [default: 1].
    #[arg(long, value_name = "M/S", allow_hyphen_values = true)]
    bin_width: Option<f64>,
    /// Output directory [default: out].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Demand scale [default: desk].
    #[arg(long)]
    dataset: Option<Dataset>,
    /// Number of days [default: 25].
    #[arg(long)]
    days: Option<usize>,
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory [default: out].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

/// Inputs after bundled defaults and file overrides are resolved.
struct Inputs {
    fleet: Fleet,
    demand: Vec<DemandProfile>,
    wind: WindSpeedSeries,
    curve: TurbinePowerCurve,
    sources: serde_json::Value,
}

fn bundled(name: &str) -> String {
    format!("bundled:{name}")
}

fn load_inputs(args: &DataArgs, rc: &RunFile) -> Result<Inputs, Failure> {
    let dataset = rc.pick(args.dataset, "dataset")?.unwrap_or(Dataset::Desk);
    let fleet_path = rc.pick_path(args.fleet.clone(), "fleet")?;
    let demand_path = rc.pick_path(args.demand.clone(), "demand")?;
    let wind_path = rc.pick_path(args.wind.clone(), "wind")?;
    let curve_path = rc.pick_path(args.curve.clone(), "curve")?;
    let set = match dataset {
        Dataset::Desk => "desk",
        Dataset::Appendix => "appendix",
    };
    let fleet = match &fleet_path {
        Some(p) => load_fleet(p, FleetFormat::from_path(p))?,
        None if dataset == Dataset::Desk => data::desk_fleet(),
        None => data::appendix_fleet(),
    };
    let demand = match &demand_path {
        Some(p) => load_demand(p)?,
        None if dataset == Dataset::Desk => data::desk_demand(),
        None => data::appendix_demand(),
    };
    let wind = match &wind_path {
        Some(p) => ucmarket::load_wind(p)?,
        None => data::wind(),
    };
    let curve = match &curve_path {
        Some(p) => load_curve(p)?,
        None => data::default_curve(),
    };
    let describe = |p: &Option<PathBuf>, default: String| p.as_ref().map_or(default, |p| p.display().to_string());
    let sources = json!({
        "fleet": describe(&fleet_path, bundled(&format!("{set}_fleet"))),
        "demand": describe(&demand_path, bundled(&format!("{set}_demand"))),
        "wind": describe(&wind_path, bundled("wind")),
        "curve": describe(&curve_path, bundled("curve")),
    });
    Ok(Inputs {
        fleet,
        demand,
        wind,
        curve,
        sources,
    })
}

struct Solver {
    limits: Limits,
    convention: UpliftConvention,
    uc: UcOptions,
}

fn solver_settings(args: &SolverArgs, rc: &RunFile) -> Result<Solver, Failure> {
    let mut limits = Limits::default();
    if let Some(t) = rc.pick(args.time_limit, "time-limit")? {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Failure::usage(format!("--time-limit must be a positive number of seconds (got {t})")));
        }
        limits.time_limit = Duration::from_secs_f64(t);
    }
    if let Some(g) = rc.pick(args.mip_gap, "mip-gap")? {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Failure::usage(format!("--mip-gap must be a non-negative number (got {g})")));
        }
        limits.mip_gap = g;
    }
    let convention = rc.pick(args.uplift_convention, "uplift-convention")?.unwrap_or_default();
    let uc = UcOptions {
        allow_wind_curtailment: rc.pick_switch(args.curtailment, "curtailment")?,
        ..UcOptions::default()
    };
    Ok(Solver { limits, convention, uc })
}

fn out_dir(flag: Option<PathBuf>, rc: &RunFile) -> Result<PathBuf, Failure> {
    let dir = rc.pick_path(flag, "out")?.unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

/// Every report file goes through here, one at a time, from the main thread.
fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn cmd_solve(args: SolveArgs, rc: &RunFile) -> Result<(), Failure> {
    let inputs = load_inputs(&args.data, rc)?;
    let solver = solver_settings(&args.solver, rc)?;
    let capacity = rc.pick(args.capacity, "capacity")?.unwrap_or(0.0);
    let label = match rc.pick(args.day, "day")? {
        Some(l) => l,
        None => inputs.demand[0].day_label.clone(),
    };
    let demand = inputs
        .demand
        .iter()
        .find(|d| d.day_label == label)
        .ok_or_else(|| Failure::usage(format!("day {label:?} is not in the demand table")))?;
    let speeds = inputs
        .wind
        .day(&label)
        .ok_or_else(|| Failure::data(format!("day {label:?} has no wind record")))?;
    let inst = build_instance(&inputs.fleet, demand, speeds, &inputs.curve, capacity, solver.uc)?;
    for w in &inst.warnings {
        warn!("{w}");
    }
    let opts = UcSolveOptions::with_limits(solver.limits);
    let (result, sched) = solve_uc_with(&inst, &opts).map_err(|e| Failure::from(e).context(format!("day {label}")))?;
    if !result.status.is_success() {
        warn!("solver stopped with status {}; reporting the best schedule found", result.status);
    }
    let violations = check_feasibility(&inst, &sched)?;
    let prices = price(&inst, &sched, solver.convention)?;
    let settlement = settle(&inst, &sched, &prices)?;

    let dir = out_dir(args.out, rc)?;
    write_file(&dir, "schedule.csv", &report::schedule_csv(&inst, &sched))?;
    write_file(&dir, "schedule.json", &report::schedule_json(&inst, &result, &sched, &violations))?;
    write_file(&dir, "prices.csv", &report::prices_csv(&prices))?;
    write_file(&dir, "settlement.csv", &report::settlement_csv(&settlement))?;
    println!(
        "day {label} capacity {capacity} MW: status {} objective {} gap {:.3e} nodes {} uplift {}",
        result.status, result.objective, result.gap, result.nodes, prices.uplift
    );
    info!("reports written to {}", dir.display());
    Ok(())
}

fn manifest(status: &str, inputs: &Inputs, cfg: &SweepConfig, extra: serde_json::Value) -> String {
    let mut m = json!({
        "status": status,
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": inputs.sources,
        "grid_mw": cfg.grid,
        "days": inputs.demand.iter().map(|d| d.day_label.as_str()).collect::<Vec<_>>(),
        "mip_gap": cfg.solve.limits.mip_gap,
        "time_limit_s": cfg.solve.limits.time_limit.as_secs_f64(),
        "uplift_convention": cfg.convention.as_str(),
        "curtailment": cfg.uc.allow_wind_curtailment,
    });
    if let (Some(obj), serde_json::Value::Object(more)) = (m.as_object_mut(), extra) {
        obj.extend(more);
    }
    let mut text = serde_json::to_string_pretty(&m).expect("manifest serializes");
    text.push('\n');
    text
}

fn cmd_sweep(args: SweepArgs, rc: &RunFile) -> Result<(), Failure> {
    let inputs = load_inputs(&args.data, rc)?;
    let solver = solver_settings(&args.solver, rc)?;
    let grid = match rc.pick(args.grid, "grid")? {
        Some(g) => parse_grid(&g).map_err(|e| Failure::usage(format!("invalid --grid: {e}")))?,
        None => ucmarket::analytics::default_grid(),
    };
    let cfg = SweepConfig {
        grid,
        uc: solver.uc,
        solve: UcSolveOptions::with_limits(solver.limits),
        convention: solver.convention,
        jobs: rc.pick(args.jobs, "jobs")?.unwrap_or(0),
    };
    let dir = out_dir(args.out, rc)?;
    // Marked incomplete until every file is on disk.
    write_file(&dir, "manifest.json", &manifest("running", &inputs, &cfg, json!({})))?;
    info!(
        "sweeping {} days x {} capacities",
        inputs.demand.len(),
        cfg.grid.len()
    );
    let sweep = run_sweep(&inputs.fleet, &inputs.demand, &inputs.wind, &inputs.curve, &cfg)?;
    let files = report::sweep_files(&sweep);
    for (name, contents) in &files {
        write_file(&dir, name, contents)?;
    }
    let failed = sweep.failed();
    for c in sweep.cells.iter().filter(|c| !c.is_solved()).take(5) {
        warn!(
            "day {} at {} MW: {} {}",
            c.day,
            c.capacity,
            c.status,
            c.message.as_deref().unwrap_or("")
        );
    }
    if failed > 0 {
        warn!("{failed} of {} cells did not solve; see cells.csv", sweep.cells.len());
    }
    let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
    let extra = json!({ "cells": sweep.cells.len(), "failed_cells": failed, "files": names });
    write_file(&dir, "manifest.json", &manifest("complete", &inputs, &cfg, extra))?;
    for s in avg_daily_cost(&sweep) {
        println!(
            "capacity {} MW: mean average cost {:.1} COP/MWh over {} days",
            s.capacity, s.stats.mean, s.stats.n
        );
    }
    println!("{} cells, {failed} failed; reports in {}", sweep.cells.len(), dir.display());
    Ok(())
}

fn cmd_windstats(args: WindstatsArgs, rc: &RunFile) -> Result<(), Failure> {
    let width = rc.pick(args.bin_width, "bin-width")?.unwrap_or(1.0);
    if !(width > 0.0) || !width.is_finite() {
        return Err(Failure::usage(format!("--bin-width must be positive (got {width})")));
    }
    let wind = match rc.pick_path(args.wind, "wind")? {
        Some(p) => ucmarket::load_wind(&p)?,
        None => data::wind(),
    };
    let stats = summarize_series(&wind).ok_or_else(|| Failure::data("wind series has no samples"))?;
    let samples: Vec<f64> = wind.samples().collect();
    let bins = histogram(&samples, width);
    let dir = out_dir(args.out, rc)?;
    write_file(&dir, "wind_stats.csv", &report::wind_stats_csv(&stats))?;
    write_file(&dir, "wind_histogram.csv", &report::histogram_csv(&bins))?;
    println!(
        "{} samples: mean {:.2} median {:.2} std {:.2} min {:.2} max {:.2} m/s",
        stats.count, stats.mean, stats.median, stats.std_dev, stats.min, stats.max
    );
    Ok(())
}

fn cmd_validate(args: DataArgs, rc: &RunFile) -> Result<(), Failure> {
    let inputs = load_inputs(&args, rc)?;
    let missing: Vec<&str> = inputs
        .demand
        .iter()
        .filter(|d| inputs.wind.day(&d.day_label).is_none())
        .map(|d| d.day_label.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(Failure::data(format!("demand days without wind: {}", missing.join(", "))));
    }
    let capacity = inputs.fleet.total_capacity();
    for d in &inputs.demand {
        if d.peak() > capacity {
            warn!("day {}: peak demand {} MW exceeds fleet capacity {capacity} MW without wind", d.day_label, d.peak());
        }
    }
    println!(
        "ok: {} units ({capacity} MW), {} demand days, {} wind days, turbine {} MW",
        inputs.fleet.len(),
        inputs.demand.len(),
        inputs.wind.day_labels.len(),
        inputs.curve.rated_power
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs, rc: &RunFile) -> Result<(), Failure> {
    let shape = match rc.pick(args.dataset, "dataset")?.unwrap_or(Dataset::Desk) {
        Dataset::Desk => DemandShape::DESK,
        Dataset::Appendix => DemandShape::APPENDIX,
    };
    let days = rc.pick(args.days, "days")?.unwrap_or(DEFAULT_DAYS);
    if days == 0 {
        return Err(Failure::usage("--days must be at least 1"));
    }
    let seed = rc.pick(args.seed, "seed")?.unwrap_or(DEFAULT_SEED);
    let dir = out_dir(args.out, rc)?;
    write_file(&dir, "demand.csv", &write_demand_csv(&demand_days(shape, days, seed)))?;
    write_file(&dir, "wind.csv", &write_wind_csv(&wind_days(days, seed)))?;
    println!("{days} synthetic days (seed {seed}) written to {}", dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let rc = match &cli.config {
        Some(p) => RunFile::load(p)?,
        None => RunFile::default(),
    };
    match cli.command {
        Command::Solve(a) => cmd_solve(a, &rc),
        Command::Sweep(a) => cmd_sweep(a, &rc),
        Command::Windstats(a) => cmd_windstats(a, &rc),
        Command::Validate(a) => cmd_validate(a, &rc),
        Command::Synth(a) => cmd_synth(a, &rc),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
