//! Text renderings of schedules, prices, settlements and sweep aggregates.
//!
//! Numbers are written with Rust's shortest round-trip formatting and no
//! thousands separators, so identical inputs give identical bytes.

use serde::Serialize;
use ucmarket_milp::SolveResult;

use crate::analytics::{
    avg_daily_cost, hourly_spot_profile, mean_spot_price, share_by_type, share_change, unit_trajectory, SweepResult,
};
use crate::fleet::Technology;
use crate::pricing::{PriceReport, SettlementReport};
use crate::uc::{UcInstance, UcSchedule, Violation};
use crate::wind::{HistogramBin, WindStats};

fn csv_string<F>(header: &[&str], fill: F) -> String
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    fill(&mut w).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn b(v: bool) -> &'static str {
    if v {
        "1"
    } else {
        "0"
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn schedule_csv(inst: &UcInstance, s: &UcSchedule) -> String {
    csv_string(&["generator", "hour", "p", "on", "startup"], |w| {
        for (g, gen) in inst.generators.iter().enumerate() {
            for t in 0..inst.horizon() {
                w.write_record([
                    gen.id.as_str(),
                    &t.to_string(),
                    &s.p[g][t].to_string(),
                    b(s.on[g][t]),
                    b(s.startup[g][t]),
                ])?;
            }
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct ScheduleBundle<'a> {
    day: &'a str,
    wind_capacity_mw: f64,
    status: &'a str,
    objective: f64,
    best_bound: f64,
    gap: f64,
    nodes: usize,
    violations: &'a [Violation],
    warnings: &'a [String],
    generators: Vec<&'a str>,
    schedule: &'a UcSchedule,
}

/// JSON bundle with the solver outcome, the violation report and the schedule.
pub fn schedule_json(inst: &UcInstance, result: &SolveResult, s: &UcSchedule, violations: &[Violation]) -> String {
    let bundle = ScheduleBundle {
        day: &inst.day_label,
        wind_capacity_mw: inst.wind_capacity,
        status: result.status.as_str(),
        objective: result.objective,
        best_bound: result.best_bound,
        gap: result.gap,
        nodes: result.nodes,
        violations,
        warnings: &inst.warnings,
        generators: inst.generators.iter().map(|g| g.id.as_str()).collect(),
        schedule: s,
    };
    let mut out = serde_json::to_string_pretty(&bundle).expect("bundle serializes");
    out.push('\n');
    out
}

pub fn prices_csv(p: &PriceReport) -> String {
    csv_string(&["hour", "mpo", "spot"], |w| {
        for (t, (m, s)) in p.mpo.iter().zip(&p.spot).enumerate() {
            w.write_record([t.to_string(), m.to_string(), s.to_string()])?;
        }
        Ok(())
    })
}

pub fn settlement_csv(r: &SettlementReport) -> String {
    csv_string(
        &["generator", "energy_revenue", "c_plant", "c_mpo", "reimbursement", "net_revenue"],
        |w| {
            for u in &r.units {
                w.write_record([
                    u.generator.clone(),
                    u.energy_revenue.to_string(),
                    u.c_plant.to_string(),
                    u.c_mpo.to_string(),
                    u.reimbursement.to_string(),
                    u.net_revenue.to_string(),
                ])?;
            }
            Ok(())
        },
    )
}

pub fn wind_stats_csv(s: &WindStats) -> String {
    csv_string(&["statistic", "value_ms"], |w| {
        for (k, v) in [("mean", s.mean), ("median", s.median), ("std_dev", s.std_dev), ("min", s.min), ("max", s.max)] {
            w.write_record([k.to_string(), v.to_string()])?;
        }
        Ok(())
    })
}

pub fn histogram_csv(bins: &[HistogramBin]) -> String {
    csv_string(&["lower_ms", "upper_ms", "count"], |w| {
        for bin in bins {
            w.write_record([bin.lower.to_string(), bin.upper.to_string(), bin.count.to_string()])?;
        }
        Ok(())
    })
}

/// Every file of a sweep report, as `(relative file name, contents)`, in a fixed order.
pub fn sweep_files(sweep: &SweepResult) -> Vec<(String, String)> {
    let mut files = vec![
        ("cells.csv".to_string(), cells_csv(sweep)),
        ("metrics.csv".to_string(), metrics_csv(sweep)),
        ("prices.csv".to_string(), sweep_prices_csv(sweep)),
        ("settlement.csv".to_string(), sweep_settlement_csv(sweep)),
        ("avg_cost.dat".to_string(), avg_cost_dat(sweep)),
        ("spot_price.dat".to_string(), spot_price_dat(sweep)),
        ("spot_hourly.dat".to_string(), spot_hourly_dat(sweep)),
        ("share_by_type.dat".to_string(), share_by_type_dat(sweep)),
        ("share_change.dat".to_string(), share_change_dat(sweep)),
    ];
    let (csv, dat) = trajectories(sweep);
    files.push(("trajectories.csv".to_string(), csv));
    files.push(("unit_trajectory.dat".to_string(), dat));
    files
}

fn cap(c: f64) -> String {
    c.to_string()
}

pub fn cells_csv(sweep: &SweepResult) -> String {
    csv_string(&["day", "capacity_mw", "status", "objective", "gap", "nodes", "message"], |w| {
        for c in &sweep.cells {
            w.write_record([
                c.day.clone(),
                cap(c.capacity),
                c.status.clone(),
                opt(c.objective),
                opt(c.gap),
                c.nodes.to_string(),
                c.message.clone().unwrap_or_default(),
            ])?;
        }
        Ok(())
    })
}

/// Long format: one row per day, capacity and metric.
pub fn metrics_csv(sweep: &SweepResult) -> String {
    csv_string(&["day", "capacity_mw", "metric", "value"], |w| {
        for c in sweep.cells.iter().filter(|c| c.is_solved()) {
            let mut row = |metric: &str, value: f64| w.write_record([c.day.clone(), cap(c.capacity), metric.to_string(), value.to_string()]);
            let p = c.prices.as_ref().expect("solved");
            let s = c.settlement.as_ref().expect("solved");
            row("objective", c.objective.unwrap_or_default())?;
            row("total_demand", c.total_demand)?;
            row("avg_cost", c.average_cost().unwrap_or_default())?;
            row("uplift", p.uplift)?;
            row("mean_mpo", p.mpo.iter().sum::<f64>() / p.mpo.len() as f64)?;
            row("mean_spot", p.spot.iter().sum::<f64>() / p.spot.len() as f64)?;
            row("all_wind_hours", p.all_wind_hours.len() as f64)?;
            row("demand_payment", s.demand_payment)?;
            row("total_reimbursement", s.total_reimbursement)?;
            row("total_retained_uplift", s.total_retained_uplift)?;
            row("conservation_residual", s.conservation_residual())?;
            let shares = c.shares();
            for (t, e) in &c.energy_by_tech {
                row(&format!("energy_{t}"), *e)?;
                row(&format!("share_{t}"), shares[t])?;
            }
        }
        Ok(())
    })
}

pub fn sweep_prices_csv(sweep: &SweepResult) -> String {
    csv_string(&["day", "capacity_mw", "hour", "mpo", "uplift", "spot"], |w| {
        for c in &sweep.cells {
            if let Some(p) = &c.prices {
                for (t, (m, s)) in p.mpo.iter().zip(&p.spot).enumerate() {
                    w.write_record([c.day.clone(), cap(c.capacity), t.to_string(), m.to_string(), p.uplift.to_string(), s.to_string()])?;
                }
            }
        }
        Ok(())
    })
}

pub fn sweep_settlement_csv(sweep: &SweepResult) -> String {
    csv_string(
        &[
            "day",
            "capacity_mw",
            "generator",
            "energy",
            "energy_revenue",
            "c_plant",
            "c_mpo",
            "reimbursement",
            "net_revenue",
            "keeps_uplift",
            "shortfall",
        ],
        |w| {
            for c in &sweep.cells {
                if let Some(s) = &c.settlement {
                    for u in &s.units {
                        w.write_record([
                            c.day.clone(),
                            cap(c.capacity),
                            u.generator.clone(),
                            u.energy.to_string(),
                            u.energy_revenue.to_string(),
                            u.c_plant.to_string(),
                            u.c_mpo.to_string(),
                            u.reimbursement.to_string(),
                            u.net_revenue.to_string(),
                            b(u.keeps_uplift).to_string(),
                            u.shortfall.to_string(),
                        ])?;
                    }
                }
            }
            Ok(())
        },
    )
}

fn stats_dat(title: &str, rows: &[crate::analytics::CapacityStats]) -> String {
    let mut out = format!("# {title}\n# capacity_mw n min mean max std_dev\n");
    for r in rows {
        let s = &r.stats;
        out.push_str(&format!("{} {} {} {} {} {}\n", r.capacity, s.n, s.min, s.mean, s.max, s.std_dev));
    }
    out
}

pub fn avg_cost_dat(sweep: &SweepResult) -> String {
    stats_dat("average daily generation cost (COP/MWh)", &avg_daily_cost(sweep))
}

pub fn spot_price_dat(sweep: &SweepResult) -> String {
    stats_dat("day-mean spot price (COP/MWh)", &mean_spot_price(sweep))
}

/// One column per capacity, one row per hour.
pub fn spot_hourly_dat(sweep: &SweepResult) -> String {
    let profile = hourly_spot_profile(sweep);
    let mut out = String::from("# mean spot price by hour (COP/MWh)\n# hour");
    for (c, _) in &profile {
        out.push_str(&format!(" cap_{c}"));
    }
    out.push('\n');
    let hours = profile.first().map_or(0, |p| p.1.len());
    for t in 0..hours {
        out.push_str(&t.to_string());
        for (_, p) in &profile {
            out.push_str(&format!(" {}", p[t]));
        }
        out.push('\n');
    }
    out
}

pub fn share_by_type_dat(sweep: &SweepResult) -> String {
    let mut out = String::from("# generation share by technology (mean, std_dev)\n# capacity_mw");
    for t in Technology::ALL {
        out.push_str(&format!(" {t}_mean {t}_std"));
    }
    out.push('\n');
    for row in share_by_type(sweep) {
        out.push_str(&row.capacity.to_string());
        for t in Technology::ALL {
            let (m, s) = row.shares[&t];
            out.push_str(&format!(" {m} {s}"));
        }
        out.push('\n');
    }
    out
}

pub fn share_change_dat(sweep: &SweepResult) -> String {
    let mut out = String::from("# change in mean share against the first capacity\n# capacity_mw");
    for t in Technology::ALL {
        out.push_str(&format!(" {t}"));
    }
    out.push('\n');
    for (c, delta) in share_change(&share_by_type(sweep)) {
        out.push_str(&c.to_string());
        for t in Technology::ALL {
            out.push_str(&format!(" {}", delta[&t]));
        }
        out.push('\n');
    }
    out
}

/// Per-unit trajectories: a tidy CSV, and a `.dat` with one gnuplot index block per unit.
pub fn trajectories(sweep: &SweepResult) -> (String, String) {
    let mut ids: Vec<String> = Vec::new();
    for c in &sweep.cells {
        for u in &c.units {
            if !ids.contains(&u.id) {
                ids.push(u.id.clone());
            }
        }
    }
    let mut dat = String::new();
    let csv = csv_string(&["generator", "capacity_mw", "hours", "net_revenue", "relative_revenue"], |w| {
        for id in &ids {
            let points = unit_trajectory(sweep, id).expect("id taken from the sweep");
            dat.push_str(&format!("# unit {id}\n# capacity_mw hours net_revenue relative_revenue\n"));
            for p in &points {
                let rel = p.relative_revenue.map_or("nan".to_string(), |r| r.to_string());
                dat.push_str(&format!("{} {} {} {}\n", p.capacity, p.hours, p.net_revenue, rel));
                w.write_record([id.clone(), cap(p.capacity), p.hours.to_string(), p.net_revenue.to_string(), opt(p.relative_revenue)])?;
            }
            dat.push_str("\n\n");
        }
        Ok(())
    });
    (csv, dat)
}
