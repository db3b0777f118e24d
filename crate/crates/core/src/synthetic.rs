//! Seeded generators for the bundled demand and wind-speed day sets.
//!
//! The bundled days are synthetic stand-ins with a realistic daily shape; they
//! are not measurements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::fleet::{DemandProfile, HORIZON};
use crate::wind::WindSpeedSeries;

pub const DEFAULT_SEED: u64 = 20_190_425;
pub const DEFAULT_DAYS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandShape {
    /// Mean daily peak (MW).
    pub peak: f64,
    /// Trough as a fraction of the peak.
    pub trough_ratio: f64,
    /// Relative standard deviation of the daily peak.
    pub day_spread: f64,
    /// Relative standard deviation of hourly noise.
    pub hour_noise: f64,
}

impl DemandShape {
    pub const DESK: DemandShape = DemandShape {
        peak: 3350.0,
        trough_ratio: 0.64,
        day_spread: 0.04,
        hour_noise: 0.01,
    };
    pub const APPENDIX: DemandShape = DemandShape {
        peak: 9600.0,
        trough_ratio: 0.66,
        day_spread: 0.04,
        hour_noise: 0.01,
    };
}

/// Normalised load shape in [0, 1]: night trough, midday shoulder, evening peak.
fn load_shape(h: f64) -> f64 {
    let bump = |centre: f64, width: f64| (-((h - centre) / width).powi(2)).exp();
    let raw = 0.18 * bump(3.5, 3.0).mul_add(-1.0, 1.0) + 0.42 * bump(11.5, 3.2) + 0.55 * bump(19.5, 2.2);
    (raw - 0.10).clamp(0.0, 1.0)
}

fn round_to(v: f64, digits: i32) -> f64 {
    let k = 10f64.powi(digits);
    (v * k).round() / k
}

fn day_labels(days: usize) -> Vec<String> {
    (1..=days).map(|d| format!("d{d:02}")).collect()
}

/// `days` demand profiles, rounded to 0.1 MW.
pub fn demand_days(shape: DemandShape, days: usize, seed: u64) -> Vec<DemandProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let day_n = Normal::new(1.0, shape.day_spread).expect("valid spread");
    let hour_n = Normal::new(0.0, shape.hour_noise).expect("valid noise");
    let norm = (0..HORIZON).map(|h| load_shape(h as f64)).fold(0.0f64, f64::max);
    day_labels(days)
        .into_iter()
        .map(|label| {
            let peak = shape.peak * day_n.sample(&mut rng);
            let trough = peak * shape.trough_ratio;
            let demand = (0..HORIZON)
                .map(|h| {
                    let level = trough + (peak - trough) * load_shape(h as f64) / norm;
                    round_to(level * (1.0 + hour_n.sample(&mut rng)), 1)
                })
                .collect();
            DemandProfile::new(label, demand).expect("synthetic demand is positive")
        })
        .collect()
}

/// `days` of hourly wind speeds (m/s, rounded to 0.01): a day-level mean, a
/// mild afternoon maximum and AR(1) hourly variation, clipped to [0.2, 14].
pub fn wind_days(days: usize, seed: u64) -> WindSpeedSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_817d);
    let day_mean = Normal::new(8.5, 1.4).expect("valid");
    let shock = Normal::new(0.0, 0.9).expect("valid");
    let labels = day_labels(days);
    let speeds = labels
        .iter()
        .map(|_| {
            let mean: f64 = day_mean.sample(&mut rng);
            let phase: f64 = rng.gen_range(-2.0..2.0);
            let mut ar = 0.0;
            (0..HORIZON)
                .map(|h| {
                    ar = 0.7 * ar + shock.sample(&mut rng);
                    let diurnal = 1.3 * ((h as f64 - 15.0 - phase) * std::f64::consts::PI / 12.0).cos();
                    round_to((mean + diurnal + ar).clamp(0.2, 14.0), 2)
                })
                .collect()
        })
        .collect();
    WindSpeedSeries::new("synthetic", labels, speeds).expect("synthetic wind is valid")
}
