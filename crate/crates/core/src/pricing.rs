//! Hourly marginal prices, start-up uplift, spot prices and per-unit settlement.

use serde::{Deserialize, Serialize};

use crate::error::{PricingError, UcError};
use crate::uc::{check_feasibility, UcInstance, UcSchedule, POWER_TOL};

/// Id used for the wind farm in settlement rows.
pub const WIND_ID: &str = "wind";

/// Which per-unit cost gap feeds the uplift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpliftConvention {
    /// `max(0, C_plant - C_mpo)`: units that do not recover their costs at the
    /// marginal price are compensated.
    #[default]
    MakeWhole,
    /// `max(0, C_mpo - C_plant)`.
    AsPrinted,
}

impl UpliftConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            UpliftConvention::MakeWhole => "make-whole",
            UpliftConvention::AsPrinted => "as-printed",
        }
    }

    /// The amount unit `g` contributes to the uplift pool.
    pub fn term(self, c_plant: f64, c_mpo: f64) -> f64 {
        match self {
            UpliftConvention::MakeWhole => (c_plant - c_mpo).max(0.0),
            UpliftConvention::AsPrinted => (c_mpo - c_plant).max(0.0),
        }
    }
}

impl std::str::FromStr for UpliftConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "make-whole" => Ok(UpliftConvention::MakeWhole),
            "as-printed" => Ok(UpliftConvention::AsPrinted),
            _ => Err(format!("unknown uplift convention {s:?} (expected make-whole or as-printed)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceReport {
    pub mpo: Vec<f64>,
    pub uplift: f64,
    pub spot: Vec<f64>,
    pub convention: UpliftConvention,
    /// Hours with no thermal or hydro dispatch; their marginal price is 0.
    pub all_wind_hours: Vec<usize>,
}

/// Energy delivered by the wind farm in each hour (MW).
pub fn wind_delivered(inst: &UcInstance, sched: &UcSchedule) -> Vec<f64> {
    inst.wind
        .iter()
        .zip(&sched.curtailed_wind)
        .map(|(w, c)| w - c)
        .collect()
}

fn ensure_feasible(inst: &UcInstance, sched: &UcSchedule) -> Result<(), PricingError> {
    let v = check_feasibility(inst, sched)?;
    match v.first() {
        None => Ok(()),
        Some(first) => Err(UcError::Infeasible {
            count: v.len(),
            first: first.to_string(),
        }
        .into()),
    }
}

/// Most expensive dispatched unit per hour, plus the hours where nothing was dispatched.
pub fn marginal_prices(inst: &UcInstance, sched: &UcSchedule) -> Result<(Vec<f64>, Vec<usize>), PricingError> {
    ensure_feasible(inst, sched)?;
    let mut mpo = vec![0.0; inst.horizon()];
    let mut idle = Vec::new();
    for (t, price) in mpo.iter_mut().enumerate() {
        let marginal = inst
            .generators
            .iter()
            .zip(&sched.p)
            .filter(|(_, p)| p[t] > POWER_TOL)
            .map(|(g, _)| g.energy_cost)
            .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.max(c))));
        match marginal {
            Some(c) => *price = c,
            None => idle.push(t),
        }
    }
    Ok((mpo, idle))
}

/// Plant cost `sum c_p p + c_su tau` of unit `g`.
pub fn plant_cost(inst: &UcInstance, sched: &UcSchedule, g: usize) -> f64 {
    let gen = &inst.generators[g];
    sched.p[g]
        .iter()
        .zip(&sched.startup[g])
        .map(|(p, &s)| gen.energy_cost * p + if s { gen.startup_cost } else { 0.0 })
        .sum()
}

/// Revenue of an output series at the marginal price.
pub fn mpo_revenue(mpo: &[f64], p: &[f64]) -> f64 {
    mpo.iter().zip(p).map(|(m, p)| m * p).sum()
}

/// Order-independent sum: terms are sorted before accumulation.
fn stable_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// Per-MWh uplift for the day.
pub fn uplift(inst: &UcInstance, sched: &UcSchedule, mpo: &[f64], convention: UpliftConvention) -> Result<f64, PricingError> {
    if mpo.len() != inst.horizon() {
        return Err(PricingError::Horizon {
            expected: inst.horizon(),
            found: mpo.len(),
        });
    }
    let total_demand = inst.total_demand();
    if !(total_demand > 0.0) {
        return Err(PricingError::ZeroDemand);
    }
    let mut terms: Vec<f64> = (0..inst.num_generators())
        .map(|g| convention.term(plant_cost(inst, sched, g), mpo_revenue(mpo, &sched.p[g])))
        .collect();
    terms.push(convention.term(0.0, mpo_revenue(mpo, &wind_delivered(inst, sched))));
    Ok(stable_sum(terms) / total_demand)
}

pub fn spot_price(mpo: &[f64], uplift: f64) -> Result<Vec<f64>, PricingError> {
    if !(uplift >= 0.0) {
        return Err(PricingError::NegativeUplift(uplift));
    }
    Ok(mpo.iter().map(|m| m + uplift).collect())
}

/// Marginal prices, uplift and spot prices for a feasible schedule.
pub fn price(inst: &UcInstance, sched: &UcSchedule, convention: UpliftConvention) -> Result<PriceReport, PricingError> {
    let (mpo, all_wind_hours) = marginal_prices(inst, sched)?;
    let up = uplift(inst, sched, &mpo, convention)?;
    let spot = spot_price(&mpo, up)?;
    Ok(PriceReport {
        mpo,
        uplift: up,
        spot,
        convention,
        all_wind_hours,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSettlement {
    pub generator: String,
    pub energy: f64,
    /// `sum spot p`
    pub energy_revenue: f64,
    pub c_plant: f64,
    pub c_mpo: f64,
    /// Uplift share handed back, `uplift * energy`, for units that do not keep it.
    pub reimbursement: f64,
    pub net_revenue: f64,
    pub keeps_uplift: bool,
    /// For uplift keepers under the make-whole convention: cost not covered by net revenue.
    pub shortfall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettlementReport {
    /// One row per generator in instance order, then the wind farm.
    pub units: Vec<UnitSettlement>,
    /// `sum spot D`
    pub demand_payment: f64,
    /// Uplift money collected from demand, `uplift * sum D`.
    pub uplift_collected: f64,
    pub total_reimbursement: f64,
    pub total_retained_uplift: f64,
}

impl SettlementReport {
    /// Relative mismatch between what demand pays and what the market hands out
    /// (net revenues plus reimbursements held by the operator).
    pub fn conservation_residual(&self) -> f64 {
        let out = stable_sum(self.units.iter().map(|u| u.net_revenue).collect()) + self.total_reimbursement;
        (self.demand_payment - out).abs() / self.demand_payment.abs().max(1.0)
    }
}

fn settle_unit(
    id: &str,
    p: &[f64],
    c_plant: f64,
    prices: &PriceReport,
) -> UnitSettlement {
    let energy: f64 = p.iter().sum();
    let c_mpo = mpo_revenue(&prices.mpo, p);
    let energy_revenue = mpo_revenue(&prices.spot, p);
    let keeps = prices.convention.term(c_plant, c_mpo) > 0.0;
    let share = prices.uplift * energy;
    let reimbursement = if keeps { 0.0 } else { share };
    let net_revenue = energy_revenue - reimbursement;
    let shortfall = if keeps && prices.convention == UpliftConvention::MakeWhole {
        (c_plant - net_revenue).max(0.0)
    } else {
        0.0
    };
    UnitSettlement {
        generator: id.to_string(),
        energy,
        energy_revenue,
        c_plant,
        c_mpo,
        reimbursement,
        net_revenue,
        keeps_uplift: keeps,
        shortfall,
    }
}

/// Pays every unit the spot price and applies the reimbursement rule.
pub fn settle(inst: &UcInstance, sched: &UcSchedule, prices: &PriceReport) -> Result<SettlementReport, PricingError> {
    ensure_feasible(inst, sched)?;
    for len in [prices.mpo.len(), prices.spot.len()] {
        if len != inst.horizon() {
            return Err(PricingError::Horizon {
                expected: inst.horizon(),
                found: len,
            });
        }
    }
    let mut units: Vec<UnitSettlement> = inst
        .generators
        .iter()
        .enumerate()
        .map(|(g, gen)| settle_unit(&gen.id, &sched.p[g], plant_cost(inst, sched, g), prices))
        .collect();
    units.push(settle_unit(WIND_ID, &wind_delivered(inst, sched), 0.0, prices));
    let demand_payment = mpo_revenue(&prices.spot, &inst.demand);
    let total_reimbursement = stable_sum(units.iter().map(|u| u.reimbursement).collect());
    let total_retained_uplift = stable_sum(
        units
            .iter()
            .filter(|u| u.keeps_uplift)
            .map(|u| prices.uplift * u.energy)
            .collect(),
    );
    Ok(SettlementReport {
        units,
        demand_payment,
        uplift_collected: prices.uplift * inst.total_demand(),
        total_reimbursement,
        total_retained_uplift,
    })
}
