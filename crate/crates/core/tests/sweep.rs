//! Sweep bookkeeping and aggregation.

use ucmarket::analytics::{avg_daily_cost, run_sweep, share_by_type, unit_trajectory, SweepConfig};
use ucmarket::fleet::{DemandProfile, Fleet, Generator, Technology};
use ucmarket::uc::{build_instance, solve_uc_with};
use ucmarket::wind::WindSpeedSeries;
use ucmarket::{data, report};

fn tiny_fleet() -> Fleet {
    Fleet::new(vec![
        Generator::new("hydro", Technology::Hydro, 500.0, 500.0, 30.0, 0.0),
        Generator::new("small", Technology::SmallHydro, 20.0, 20.0, 0.0, 0.0),
        Generator::new("gas", Technology::Gas, 300.0, 300.0, 80.0, 500.0),
        Generator::new("idle", Technology::Gas, 50.0, 50.0, 5e6, 5e8),
    ])
    .unwrap()
}

fn tiny_days(n: usize) -> (Vec<DemandProfile>, WindSpeedSeries) {
    let demand = (0..n)
        .map(|d| DemandProfile::new(format!("d{d}"), (0..24).map(|h| 300.0 + 10.0 * d as f64 + 8.0 * h as f64).collect()).unwrap())
        .collect();
    let labels = (0..n).map(|d| format!("d{d}")).collect();
    let speeds = (0..n).map(|d| (0..24).map(|h| 4.0 + ((d + h) % 9) as f64).collect()).collect();
    (demand, WindSpeedSeries::new("tiny", labels, speeds).unwrap())
}

#[test]
fn cardinality_and_shares() {
    let (demand, wind) = tiny_days(25);
    let grid: Vec<f64> = (0..11).map(|k| k as f64 * 20.0).collect();
    let cfg = SweepConfig { grid, ..SweepConfig::default() };
    let sweep = run_sweep(&tiny_fleet(), &demand, &wind, &data::default_curve(), &cfg).unwrap();
    assert_eq!(sweep.cells.len(), 275);
    assert_eq!(sweep.failed(), 0);
    for c in &sweep.cells {
        let total: f64 = c.shares().values().sum();
        assert!((total - 1.0).abs() <= 1e-6);
    }
    let shares = share_by_type(&sweep);
    assert_eq!(shares[0].shares[&Technology::Wind].0, 0.0);
    let idle = unit_trajectory(&sweep, "idle").unwrap();
    assert!(idle.iter().all(|p| p.hours == 0.0 && p.net_revenue == 0.0 && p.relative_revenue.is_none()));
    let gas = unit_trajectory(&sweep, "gas").unwrap();
    assert_eq!(gas[0].relative_revenue, Some(1.0));
    assert!(unit_trajectory(&sweep, "nope").is_err());
}

#[test]
fn single_cell_equals_direct_solve() {
    let (fleet, demand, wind, curve) = (data::desk_fleet(), data::desk_demand(), data::wind(), data::default_curve());
    let cfg = SweepConfig { grid: vec![0.0], ..SweepConfig::default() };
    let sweep = run_sweep(&fleet, &demand[..1], &wind, &curve, &cfg).unwrap();
    assert_eq!(sweep.cells.len(), 1);
    let inst = build_instance(&fleet, &demand[0], wind.day("d01").unwrap(), &curve, 0.0, cfg.uc).unwrap();
    let (r, s) = solve_uc_with(&inst, &cfg.solve).unwrap();
    let cell = &sweep.cells[0];
    assert_eq!(cell.objective, Some(r.objective));
    let traj = unit_trajectory(&sweep, "G5").unwrap();
    assert_eq!(traj[0].hours, s.hours_dispatched(fleet.index_of("G5").unwrap()) as f64);
    let costs = avg_daily_cost(&sweep);
    assert_eq!((costs[0].stats.min, costs[0].stats.max), (costs[0].stats.mean, costs[0].stats.mean));
}

#[test]
fn worker_count_does_not_change_results() {
    let (fleet, demand, wind, curve) = (data::desk_fleet(), data::desk_demand(), data::wind(), data::default_curve());
    let grid = vec![0.0, 505.5, 1000.0];
    let one = SweepConfig { grid: grid.clone(), jobs: 1, ..SweepConfig::default() };
    let four = SweepConfig { grid, jobs: 4, ..SweepConfig::default() };
    let a = run_sweep(&fleet, &demand[..4], &wind, &curve, &one).unwrap();
    let b = run_sweep(&fleet, &demand[..4], &wind, &curve, &four).unwrap();
    assert_eq!(report::sweep_files(&a), report::sweep_files(&b));
}

#[test]
fn desk_objective_falls_with_capacity() {
    let (fleet, demand, wind, curve) = (data::desk_fleet(), data::desk_demand(), data::wind(), data::default_curve());
    let cfg = SweepConfig { grid: vec![0.0, 250.0, 505.5, 750.0, 1000.0], ..SweepConfig::default() };
    let sweep = run_sweep(&fleet, &demand[..3], &wind, &curve, &cfg).unwrap();
    for d in 0..3 {
        for k in 1..cfg.grid.len() {
            let (prev, next) = (sweep.cell(d, k - 1).objective.unwrap(), sweep.cell(d, k).objective.unwrap());
            // each cell is solved to the default relative gap
            assert!(next <= prev * (1.0 + 1e-4), "day {d}: {prev} -> {next}");
        }
    }
}
