//! Data sets compiled into the library.

use crate::fleet::{parse_demand_csv, parse_fleet_csv, DemandProfile, Fleet};
use crate::wind::{parse_curve_csv, parse_wind_csv, TurbinePowerCurve, WindSpeedSeries};

pub const APPENDIX_FLEET_CSV: &str = include_str!("../data/appendix_fleet.csv");
pub const DESK_FLEET_CSV: &str = include_str!("../data/desk_fleet.csv");
pub const CURVE_CSV: &str = include_str!("../data/v90_curve.csv");
pub const DESK_DEMAND_CSV: &str = include_str!("../data/desk_demand.csv");
pub const APPENDIX_DEMAND_CSV: &str = include_str!("../data/appendix_demand.csv");
pub const WIND_CSV: &str = include_str!("../data/wind.csv");

/// The 51-unit reference fleet.
pub fn appendix_fleet() -> Fleet {
    parse_fleet_csv(APPENDIX_FLEET_CSV.as_bytes(), "appendix_fleet.csv").expect("bundled fleet is valid")
}

/// The 12-unit desk fleet.
pub fn desk_fleet() -> Fleet {
    parse_fleet_csv(DESK_FLEET_CSV.as_bytes(), "desk_fleet.csv").expect("bundled fleet is valid")
}

/// 2 MW turbine curve, cut-in 4 m/s, plateau from 13 m/s, cut-out 25 m/s.
pub fn default_curve() -> TurbinePowerCurve {
    parse_curve_csv(CURVE_CSV.as_bytes(), "v90_curve.csv").expect("bundled curve is valid")
}

/// 25 synthetic days sized for the desk fleet.
pub fn desk_demand() -> Vec<DemandProfile> {
    parse_demand_csv(DESK_DEMAND_CSV.as_bytes(), "desk_demand.csv").expect("bundled demand is valid")
}

/// 25 synthetic days sized for the appendix fleet.
pub fn appendix_demand() -> Vec<DemandProfile> {
    parse_demand_csv(APPENDIX_DEMAND_CSV.as_bytes(), "appendix_demand.csv").expect("bundled demand is valid")
}

/// 25 synthetic days of hourly wind speed.
pub fn wind() -> WindSpeedSeries {
    parse_wind_csv(WIND_CSV.as_bytes(), "wind.csv", "synthetic".into()).expect("bundled wind is valid")
}
