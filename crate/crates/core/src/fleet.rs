//! Generator fleet, demand profiles and market-participation classes.

use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::DataError;

/// Number of hourly periods in a day-ahead horizon.
pub const HORIZON: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technology {
    Hydro,
    SmallHydro,
    Gas,
    Coal,
    /// Wind farms enter the model as an external, zero-cost injection.
    Wind,
}

impl Technology {
    pub const ALL: [Technology; 5] = [
        Technology::Hydro,
        Technology::SmallHydro,
        Technology::Gas,
        Technology::Coal,
        Technology::Wind,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Technology::Hydro => "hydro",
            Technology::SmallHydro => "small_hydro",
            Technology::Gas => "gas",
            Technology::Coal => "coal",
            Technology::Wind => "wind",
        }
    }

    /// Hydro plants declare zero start-up cost.
    pub fn is_hydro(self) -> bool {
        matches!(self, Technology::Hydro | Technology::SmallHydro)
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match key.as_str() {
            "hydro" => Ok(Technology::Hydro),
            "smallhydro" => Ok(Technology::SmallHydro),
            "gas" => Ok(Technology::Gas),
            "coal" => Ok(Technology::Coal),
            "wind" => Ok(Technology::Wind),
            _ => Err(format!("unknown technology {s:?}")),
        }
    }
}

/// One dispatchable unit. Powers in MW, costs in COP/MWh and COP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub name: String,
    pub tech: Technology,
    pub p_max: f64,
    pub p_min: f64,
    pub ramp_up: f64,
    pub ramp_down: f64,
    pub energy_cost: f64,
    pub startup_cost: f64,
    pub initial_on: bool,
    pub initial_power: f64,
}

impl Generator {
    /// Convenience constructor with `p_min = 0`, symmetric ramps and an off initial state.
    pub fn new(
        id: impl Into<String>,
        tech: Technology,
        p_max: f64,
        ramp: f64,
        energy_cost: f64,
        startup_cost: f64,
    ) -> Self {
        let id = id.into();
        Generator {
            name: id.clone(),
            id,
            tech,
            p_max,
            p_min: 0.0,
            ramp_up: ramp,
            ramp_down: ramp,
            energy_cost,
            startup_cost,
            initial_on: false,
            initial_power: 0.0,
        }
    }

    /// Checks every unit invariant; the first violation is reported.
    pub fn validate(&self, opts: &ValidationOptions) -> Result<(), DataError> {
        let fail = |message: String| {
            Err(DataError::InvalidGenerator {
                unit: self.id.clone(),
                message,
            })
        };
        let fields = [
            ("p_max", self.p_max),
            ("p_min", self.p_min),
            ("ramp_up", self.ramp_up),
            ("ramp_down", self.ramp_down),
            ("energy_cost", self.energy_cost),
            ("startup_cost", self.startup_cost),
            ("initial_power", self.initial_power),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return fail(format!("{name} must be finite"));
            }
        }
        if self.id.trim().is_empty() {
            return fail("id must not be empty".into());
        }
        if self.tech == Technology::Wind {
            return fail("wind is supplied as an external series, not as a fleet unit".into());
        }
        if self.p_min < 0.0 {
            return fail(format!("p_min = {} violates 0 <= p_min", self.p_min));
        }
        if self.p_min > self.p_max {
            return fail(format!("p_min = {} exceeds p_max = {}", self.p_min, self.p_max));
        }
        if self.ramp_up <= 0.0 || self.ramp_down <= 0.0 {
            return fail("ramp limits must be positive".into());
        }
        if self.energy_cost < 0.0 || self.startup_cost < 0.0 {
            return fail("costs must be non-negative".into());
        }
        if !self.initial_on && self.initial_power != 0.0 {
            return fail("initial_power must be 0 when initial_on is false".into());
        }
        if self.initial_on && (self.initial_power < 0.0 || self.initial_power > self.p_max) {
            return fail(format!("initial_power = {} outside [0, p_max]", self.initial_power));
        }
        if self.tech.is_hydro() && self.startup_cost != 0.0 && !opts.allow_hydro_startup_cost {
            return fail(format!(
                "{} units declare zero start-up cost (got {})",
                self.tech, self.startup_cost
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Accept hydro units with a non-zero start-up cost.
    pub allow_hydro_startup_cost: bool,
}

/// Day-ahead market participation class, a function of rated capacity only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Participation {
    /// Above 20 MW: must offer into the central dispatch.
    Mandatory,
    /// 10 to 20 MW inclusive: may choose to participate.
    Optional,
    /// Below 10 MW: takes the market price.
    PriceTaker,
}

pub fn classify_participation(g: &Generator) -> Participation {
    if g.p_max > 20.0 {
        Participation::Mandatory
    } else if g.p_max >= 10.0 {
        Participation::Optional
    } else {
        Participation::PriceTaker
    }
}

/// A validated set of generators. Row order is preserved from the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fleet {
    pub generators: Vec<Generator>,
    pub currency_unit: String,
    #[serde(default)]
    pub metadata: Vec<String>,
}

impl Fleet {
    pub fn new(generators: Vec<Generator>) -> Result<Self, DataError> {
        let fleet = Fleet {
            generators,
            currency_unit: "COP".into(),
            metadata: Vec::new(),
        };
        fleet.validate(&ValidationOptions::default())?;
        Ok(fleet)
    }

    pub fn validate(&self, opts: &ValidationOptions) -> Result<(), DataError> {
        if self.generators.is_empty() {
            return Err(DataError::Empty {
                origin: "fleet".into(),
                message: "no generator rows".into(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for g in &self.generators {
            g.validate(opts)?;
            if !seen.insert(g.id.as_str()) {
                return Err(DataError::InvalidGenerator {
                    unit: g.id.clone(),
                    message: "duplicate id".into(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.id == id)
    }

    pub fn total_capacity(&self) -> f64 {
        self.generators.iter().map(|g| g.p_max).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FleetFormat {
    Csv,
    Json,
}

impl FleetFormat {
    /// Guesses the format from a file extension; CSV unless it ends in `.json`.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => FleetFormat::Json,
            _ => FleetFormat::Csv,
        }
    }
}

pub const FLEET_COLUMNS: [&str; 11] = [
    "id",
    "name",
    "tech",
    "p_max_mw",
    "p_min_mw",
    "ramp_up_mw",
    "ramp_down_mw",
    "energy_cost_cop_mwh",
    "startup_cost_cop",
    "initial_on",
    "initial_power_mw",
];

fn read_file(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_fleet(path: &Path, format: FleetFormat) -> Result<Fleet, DataError> {
    let text = read_file(path)?;
    let origin = path.display().to_string();
    match format {
        FleetFormat::Csv => parse_fleet_csv(text.as_bytes(), &origin),
        FleetFormat::Json => parse_fleet_json(&text, &origin),
    }
}

pub fn parse_fleet_json(text: &str, origin: &str) -> Result<Fleet, DataError> {
    let fleet: Fleet = serde_json::from_str(text)
        .map_err(|e| DataError::parse(origin, e.line() as u64, None, e.to_string()))?;
    fleet.validate(&ValidationOptions::default())?;
    Ok(fleet)
}

/// Parses `fleet.csv`. Lines starting with `#` are kept as metadata notes.
pub fn parse_fleet_csv<R: Read>(reader: R, origin: &str) -> Result<Fleet, DataError> {
    parse_fleet_csv_with(reader, origin, &ValidationOptions::default())
}

pub fn parse_fleet_csv_with<R: Read>(
    mut reader: R,
    origin: &str,
    opts: &ValidationOptions,
) -> Result<Fleet, DataError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| DataError::parse(origin, 0, None, e.to_string()))?;
    let metadata: Vec<String> = text
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .collect();

    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| DataError::parse(origin, 1, None, e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let required = [0usize, 1, 2, 3, 5, 6, 7, 8];
    for &k in &required {
        if col(FLEET_COLUMNS[k]).is_none() {
            return Err(DataError::parse(
                origin,
                1,
                Some(FLEET_COLUMNS[k].into()),
                "missing required column",
            ));
        }
    }
    let idx: Vec<Option<usize>> = FLEET_COLUMNS.iter().map(|c| col(c)).collect();

    let mut generators = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            DataError::parse(origin, line, None, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| -> Option<&str> {
            idx[k].and_then(|i| record.get(i)).filter(|s| !s.is_empty())
        };
        let number = |k: usize| -> Result<Option<f64>, DataError> {
            match field(k) {
                None => Ok(None),
                Some(s) => s.parse::<f64>().map(Some).map_err(|_| {
                    DataError::parse(origin, line, Some(FLEET_COLUMNS[k].into()), format!("not a number: {s:?}"))
                }),
            }
        };
        let required_number = |k: usize| -> Result<f64, DataError> {
            number(k)?.ok_or_else(|| {
                DataError::parse(origin, line, Some(FLEET_COLUMNS[k].into()), "missing value")
            })
        };
        let id = field(0)
            .ok_or_else(|| DataError::parse(origin, line, Some("id".into()), "missing value"))?
            .to_string();
        let tech = field(2)
            .ok_or_else(|| DataError::parse(origin, line, Some("tech".into()), "missing value"))?
            .parse::<Technology>()
            .map_err(|m| DataError::parse(origin, line, Some("tech".into()), m))?;
        let initial_on = match field(9) {
            None => false,
            Some(s) => parse_bool(s).ok_or_else(|| {
                DataError::parse(origin, line, Some("initial_on".into()), format!("not a boolean: {s:?}"))
            })?,
        };
        generators.push(Generator {
            name: field(1).unwrap_or(&id).to_string(),
            id,
            tech,
            p_max: required_number(3)?,
            p_min: number(4)?.unwrap_or(0.0),
            ramp_up: required_number(5)?,
            ramp_down: required_number(6)?,
            energy_cost: required_number(7)?,
            startup_cost: required_number(8)?,
            initial_on,
            initial_power: number(10)?.unwrap_or(0.0),
        });
    }
    if generators.is_empty() {
        return Err(DataError::Empty {
            origin: origin.to_string(),
            message: "no generator rows".into(),
        });
    }
    let fleet = Fleet {
        generators,
        currency_unit: "COP".into(),
        metadata,
    };
    fleet.validate(opts)?;
    Ok(fleet)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

/// Writes the canonical CSV form, metadata first as `#` comments.
pub fn write_fleet_csv(fleet: &Fleet) -> String {
    let mut out = String::new();
    for note in &fleet.metadata {
        out.push_str("# ");
        out.push_str(note);
        out.push('\n');
    }
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(FLEET_COLUMNS).expect("in-memory write");
    for g in &fleet.generators {
        wtr.write_record([
            g.id.clone(),
            g.name.clone(),
            g.tech.to_string(),
            g.p_max.to_string(),
            g.p_min.to_string(),
            g.ramp_up.to_string(),
            g.ramp_down.to_string(),
            g.energy_cost.to_string(),
            g.startup_cost.to_string(),
            g.initial_on.to_string(),
            g.initial_power.to_string(),
        ])
        .expect("in-memory write");
    }
    out.push_str(&String::from_utf8(wtr.into_inner().expect("flush")).expect("utf8"));
    out
}

pub fn write_fleet_json(fleet: &Fleet) -> String {
    serde_json::to_string_pretty(fleet).expect("fleet serializes")
}

/// Hourly demand of one typical day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandProfile {
    pub day_label: String,
    pub demand: Vec<f64>,
}

impl DemandProfile {
    pub fn new(day_label: impl Into<String>, demand: Vec<f64>) -> Result<Self, DataError> {
        let p = DemandProfile {
            day_label: day_label.into(),
            demand,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.demand.len() != HORIZON {
            return Err(DataError::Horizon {
                day: self.day_label.clone(),
                found: self.demand.len(),
            });
        }
        for (hour, &value) in self.demand.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(DataError::NonPositiveDemand {
                    day: self.day_label.clone(),
                    hour,
                    value,
                });
            }
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.demand.iter().sum()
    }

    pub fn peak(&self) -> f64 {
        self.demand.iter().copied().fold(f64::MIN, f64::max)
    }
}

pub fn hour_columns() -> Vec<String> {
    (0..HORIZON).map(|h| format!("h{h:02}")).collect()
}

/// Reads `day_label,h00..h23` rows. Values must be finite; further checks are the caller's.
pub(crate) fn parse_day_table<R: Read>(reader: R, origin: &str) -> Result<Vec<(String, Vec<f64>, u64)>, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| DataError::parse(origin, 1, None, e.to_string()))?
        .clone();
    if headers.get(0) != Some("day_label") {
        return Err(DataError::parse(origin, 1, Some("day_label".into()), "first column must be day_label"));
    }
    let mut days = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            DataError::parse(origin, line, None, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let label = record.get(0).unwrap_or("").to_string();
        if label.is_empty() {
            return Err(DataError::parse(origin, line, Some("day_label".into()), "missing value"));
        }
        let mut values = Vec::with_capacity(HORIZON);
        for (k, s) in record.iter().skip(1).enumerate() {
            if s.is_empty() {
                continue;
            }
            let v = s.parse::<f64>().map_err(|_| {
                DataError::parse(origin, line, Some(format!("h{k:02}")), format!("not a number: {s:?}"))
            })?;
            if !v.is_finite() {
                return Err(DataError::parse(origin, line, Some(format!("h{k:02}")), "value must be finite"));
            }
            values.push(v);
        }
        days.push((label, values, line));
    }
    if days.is_empty() {
        return Err(DataError::Empty {
            origin: origin.to_string(),
            message: "no day rows".into(),
        });
    }
    let mut seen = std::collections::HashSet::new();
    for (label, _, line) in &days {
        if !seen.insert(label.clone()) {
            return Err(DataError::parse(origin, *line, Some("day_label".into()), format!("duplicate day label {label:?}")));
        }
    }
    Ok(days)
}

pub fn load_demand(path: &Path) -> Result<Vec<DemandProfile>, DataError> {
    let text = read_file(path)?;
    parse_demand_csv(text.as_bytes(), &path.display().to_string())
}

pub fn parse_demand_csv<R: Read>(reader: R, origin: &str) -> Result<Vec<DemandProfile>, DataError> {
    parse_day_table(reader, origin)?
        .into_iter()
        .map(|(label, values, _)| DemandProfile::new(label, values))
        .collect()
}

pub fn write_day_table<'a, I>(rows: I) -> String
where
    I: IntoIterator<Item = (&'a str, &'a [f64])>,
{
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["day_label".to_string()];
    header.extend(hour_columns());
    wtr.write_record(&header).expect("in-memory write");
    for (label, values) in rows {
        let mut rec = vec![label.to_string()];
        rec.extend(values.iter().map(|v| v.to_string()));
        wtr.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("flush")).expect("utf8")
}

pub fn write_demand_csv(days: &[DemandProfile]) -> String {
    write_day_table(days.iter().map(|d| (d.day_label.as_str(), d.demand.as_slice())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "id,name,tech,p_max_mw,p_min_mw,ramp_up_mw,ramp_down_mw,energy_cost_cop_mwh,startup_cost_cop,initial_on,initial_power_mw\n";

    #[test]
    fn appendix_row_47() {
        let text = format!("{HEADER}47,Gen 47,Gas,30,,6,6,37000,2889885,,\n");
        let fleet = parse_fleet_csv(text.as_bytes(), "test").unwrap();
        let g = &fleet.generators[0];
        assert_eq!(g.id, "47");
        assert_eq!(g.tech, Technology::Gas);
        assert_eq!(g.p_max, 30.0);
        assert_eq!(g.p_min, 0.0);
        assert_eq!(g.ramp_up, 6.0);
        assert_eq!(g.energy_cost, 37_000.0);
        assert_eq!(g.startup_cost, 2_889_885.0);
        assert!(!g.initial_on);
        assert_eq!(g.initial_power, 0.0);
    }

    #[test]
    fn p_min_above_p_max_is_rejected() {
        let text = format!("{HEADER}1,a,gas,30,40,6,6,1,1,false,0\n");
        let err = parse_fleet_csv(text.as_bytes(), "test").unwrap_err();
        assert!(matches!(&err, DataError::InvalidGenerator { unit, .. } if unit == "1"), "{err}");
        assert!(err.to_string().contains("p_min"));
    }

    #[test]
    fn empty_file_has_no_generator_rows() {
        let err = parse_fleet_csv(HEADER.as_bytes(), "test").unwrap_err();
        assert!(err.to_string().contains("no generator rows"), "{err}");
        let err = parse_fleet_csv("".as_bytes(), "test").unwrap_err();
        assert!(matches!(err, DataError::Parse { .. } | DataError::Empty { .. }));
    }

    #[test]
    fn parse_errors_carry_location() {
        let text = format!("{HEADER}1,a,gas,30,0,6,6,1,1,false,0\n2,b,gas,thirty,0,6,6,1,1,false,0\n");
        match parse_fleet_csv(text.as_bytes(), "fleet.csv").unwrap_err() {
            DataError::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert_eq!(column.as_deref(), Some("p_max_mw"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn hydro_startup_cost_needs_override() {
        let text = format!("{HEADER}1,a,hydro,30,0,6,6,1,5,false,0\n");
        assert!(parse_fleet_csv(text.as_bytes(), "t").is_err());
        let opts = ValidationOptions { allow_hydro_startup_cost: true };
        assert!(parse_fleet_csv_with(text.as_bytes(), "t", &opts).is_ok());
    }

    #[test]
    fn initial_power_requires_initial_on() {
        let mut g = Generator::new("x", Technology::Gas, 10.0, 5.0, 1.0, 0.0);
        g.initial_power = 3.0;
        assert!(g.validate(&ValidationOptions::default()).is_err());
        g.initial_on = true;
        assert!(g.validate(&ValidationOptions::default()).is_ok());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let g = Generator::new("x", Technology::Gas, 10.0, 5.0, 1.0, 0.0);
        assert!(Fleet::new(vec![g.clone(), g]).is_err());
    }

    #[test]
    fn participation_thresholds() {
        let with = |p| Generator::new("x", Technology::Gas, p, 1.0, 0.0, 0.0);
        assert_eq!(classify_participation(&with(30.0)), Participation::Mandatory);
        assert_eq!(classify_participation(&with(15.0)), Participation::Optional);
        assert_eq!(classify_participation(&with(5.0)), Participation::PriceTaker);
        assert_eq!(classify_participation(&with(10.0)), Participation::Optional);
        assert_eq!(classify_participation(&with(20.0)), Participation::Optional);
        assert_eq!(classify_participation(&with(20.000001)), Participation::Mandatory);
        assert_eq!(classify_participation(&with(9.999999)), Participation::PriceTaker);
    }

    #[test]
    fn demand_rows() {
        let mut text = String::from("day_label,");
        text.push_str(&hour_columns().join(","));
        text.push('\n');
        for d in 0..25 {
            let vals: Vec<String> = (0..24).map(|h| format!("{}", 100 + d + h)).collect();
            text.push_str(&format!("d{d},{}\n", vals.join(",")));
        }
        let days = parse_demand_csv(text.as_bytes(), "t").unwrap();
        assert_eq!(days.len(), 25);
        assert_eq!(days[3].demand[2], 105.0);
    }

    #[test]
    fn demand_horizon_and_sign() {
        let header = format!("day_label,{}\n", hour_columns().join(","));
        let short: Vec<String> = (0..23).map(|_| "1".to_string()).collect();
        let text = format!("{header}a,{}\n", short.join(","));
        let err = parse_demand_csv(text.as_bytes(), "t").unwrap_err();
        assert!(err.to_string().contains("horizon must be 24"), "{err}");

        let mut vals: Vec<String> = (0..24).map(|_| "1".to_string()).collect();
        vals[5] = "0.0".into();
        let text = format!("{header}a,{}\n", vals.join(","));
        let err = parse_demand_csv(text.as_bytes(), "t").unwrap_err();
        assert!(err.to_string().contains("demand must be positive"), "{err}");
    }

    fn arb_generator() -> impl Strategy<Value = Generator> {
        (
            "[a-z][a-z0-9]{0,5}",
            0usize..4,
            1.0f64..2000.0,
            0.0f64..1.0,
            0.1f64..2000.0,
            0.0f64..1e7,
            0.0f64..2e8,
            any::<bool>(),
            0.0f64..1.0,
        )
            .prop_map(|(id, t, p_max, pmin_frac, ramp, cost, su, on, init_frac)| {
                let tech = [Technology::Hydro, Technology::SmallHydro, Technology::Gas, Technology::Coal][t];
                Generator {
                    name: format!("unit {id}"),
                    id,
                    tech,
                    p_max,
                    p_min: p_max * pmin_frac,
                    ramp_up: ramp,
                    ramp_down: ramp * 0.5 + 0.1,
                    energy_cost: cost,
                    startup_cost: if tech.is_hydro() { 0.0 } else { su },
                    initial_on: on,
                    initial_power: if on { p_max * init_frac } else { 0.0 },
                }
            })
    }

    proptest! {
        #[test]
        fn csv_and_json_round_trip(gens in proptest::collection::vec(arb_generator(), 1..8)) {
            let mut gens = gens;
            for (k, g) in gens.iter_mut().enumerate() {
                g.id = format!("{}{k}", g.id);
            }
            let mut fleet = Fleet::new(gens).unwrap();
            fleet.metadata = vec!["source: generated".into()];
            let back = parse_fleet_csv(write_fleet_csv(&fleet).as_bytes(), "rt").unwrap();
            prop_assert_eq!(&back, &fleet);
            let back = parse_fleet_json(&write_fleet_json(&fleet), "rt").unwrap();
            prop_assert_eq!(back, fleet);
        }

        #[test]
        fn classification_depends_on_capacity_only(p in 0.0f64..100.0, cost in 0.0f64..1e6) {
            let a = Generator::new("a", Technology::Gas, p, 1.0, cost, 5.0);
            let b = Generator::new("b", Technology::Hydro, p, 7.0, 0.0, 0.0);
            prop_assert_eq!(classify_participation(&a), classify_participation(&b));
        }
    }
}
