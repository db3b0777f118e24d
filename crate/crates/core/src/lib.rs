//! Day-ahead market simulation: fleet data, wind conversion, unit commitment,
//! spot pricing with start-up uplift, and capacity-sweep analytics.

pub mod analytics;
pub mod data;
pub mod error;
pub mod fleet;
pub mod pricing;
pub mod report;
pub mod synthetic;
pub mod uc;
pub mod wind;

pub use error::{DataError, PricingError, UcError};
pub use fleet::{
    classify_participation, load_demand, load_fleet, DemandProfile, Fleet, FleetFormat, Generator, Participation,
    Technology, HORIZON,
};
pub use pricing::{price, settle, PriceReport, SettlementReport, UpliftConvention};
pub use uc::{build_instance, check_feasibility, evaluate_cost, solve_uc, solve_uc_with, to_milp, UcInstance, UcSchedule};
pub use wind::{farm_power, load_curve, load_wind, summarize, TurbinePowerCurve, WindSpeedSeries, WindStats};
