//! Seeded random LPs and small commitment instances.

use rand::Rng;
use ucmarket::fleet::{Generator, Technology};
use ucmarket::uc::{UcInstance, UcOptions};
use ucmarket_milp::{LinearProgram, Sense};

/// A bounded LP with `m` rows and `n` columns that is feasible by construction:
/// a random interior point is drawn first and every row is satisfied at it.
pub fn feasible_lp<R: Rng>(rng: &mut R, m: usize, n: usize) -> LinearProgram {
    let mut lp = LinearProgram::new();
    let mut point = Vec::with_capacity(n);
    for _ in 0..n {
        let cost = rng.gen_range(-10.0..10.0);
        let (lo, hi) = match rng.gen_range(0..4) {
            0 => (0.0, rng.gen_range(1.0..20.0)),
            1 => {
                let lo = rng.gen_range(-10.0..0.0);
                (lo, lo + rng.gen_range(1.0..20.0))
            }
            2 => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        };
        let x = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => rng.gen_range(lo..hi),
            (true, false) => lo + rng.gen_range(0.0..10.0),
            _ => rng.gen_range(-10.0..10.0),
        };
        point.push(x);
        lp.add_var(cost, lo, hi);
    }
    for _ in 0..m {
        let mut coeffs: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.6) {
                coeffs.push((j, rng.gen_range(-5.0..5.0)));
            }
        }
        let act: f64 = coeffs.iter().map(|&(j, a)| a * point[j]).sum();
        let (sense, rhs) = match rng.gen_range(0..5) {
            0 => (Sense::Eq, act),
            1 | 2 => (Sense::Le, act + rng.gen_range(0.0..10.0)),
            _ => (Sense::Ge, act - rng.gen_range(0.0..10.0)),
        };
        lp.add_row(&coeffs, sense, rhs);
    }
    // keep unbounded columns inside a box so the optimum is finite
    for j in 0..n {
        if lp.upper[j].is_infinite() {
            lp.add_row(&[(j, 1.0)], Sense::Le, point[j].abs() + 50.0);
        }
        if lp.lower[j].is_infinite() {
            lp.add_row(&[(j, 1.0)], Sense::Ge, -point[j].abs() - 50.0);
        }
    }
    lp
}

/// A commitment instance with at most `max_generators` units, at most
/// `max_hours` hours and at most `max_binaries` on/off decisions.
pub fn uc_instance<R: Rng>(rng: &mut R, max_generators: usize, max_hours: usize, max_binaries: usize) -> UcInstance {
    let ng = rng.gen_range(1..=max_generators);
    let nt = rng.gen_range(1..=max_hours.min(max_binaries / ng).max(1));
    let techs = [Technology::Hydro, Technology::Gas, Technology::Coal, Technology::SmallHydro];
    let generators: Vec<Generator> = (0..ng)
        .map(|k| {
            let tech = techs[rng.gen_range(0..techs.len())];
            let p_max = rng.gen_range(20.0..150.0f64).round();
            let p_min = if rng.gen_bool(0.3) { (p_max * rng.gen_range(0.1..0.5f64)).round() } else { 0.0 };
            let ramp_up = if rng.gen_bool(0.5) { p_max } else { (p_max * rng.gen_range(0.2..0.8f64)).round().max(1.0) };
            let ramp_down = if rng.gen_bool(0.5) { ramp_up } else { p_max };
            let startup_cost = if tech.is_hydro() || rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(100.0..5000.0f64).round() };
            let initial_on = rng.gen_bool(0.3);
            let initial_power = if initial_on { (p_min + (p_max - p_min) * rng.gen_range(0.0..1.0f64)).round().min(p_max) } else { 0.0 };
            Generator {
                id: format!("g{k}"),
                name: format!("unit {k}"),
                tech,
                p_max,
                p_min,
                ramp_up,
                ramp_down,
                energy_cost: rng.gen_range(1.0..100.0f64).round(),
                startup_cost,
                initial_on,
                initial_power,
            }
        })
        .collect();
    let capacity: f64 = generators.iter().map(|g| g.p_max).sum();
    let demand: Vec<f64> = (0..nt).map(|_| (capacity * rng.gen_range(0.15..0.75f64)).round().max(1.0)).collect();
    let wind: Vec<f64> = demand
        .iter()
        .map(|d| if rng.gen_bool(0.4) { (d * rng.gen_range(0.0..0.6f64)).round() } else { 0.0 })
        .collect();
    let options = UcOptions {
        allow_wind_curtailment: rng.gen_bool(0.3),
        ..UcOptions::default()
    };
    UcInstance::new(generators, demand, wind, options).expect("generated instance is valid")
}
