//! Discounted energy ledger, internal-trading storage prices and system
//! indices computed from a solved plan.
//!
//! Every part of the system (generation, battery, hydrogen, ammonia) is
//! priced so that its net present value is zero when it sells its output at
//! its own levelized price and buys electricity from generation and
//! hydrogen from the hydrogen part at theirs.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::domain::{ModelInputs, OpVar, Part, PlanSolution};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no generation to price")]
    NoGeneration,
    #[error("trading system is singular")]
    Singular,
}

/// Present value of every energy flow (MWh, hydrogen in Nm³) weighted by
/// the stage annuity factor, and the cost terms grouped by part.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PresentValueLedger {
    pub wind: f64,
    pub solar: f64,
    pub coal_fired: f64,
    pub curtailment: f64,
    pub battery_charge: f64,
    pub battery_discharge: f64,
    pub electrolyzer: f64,
    pub synthesis: f64,
    pub fuel_cell: f64,
    pub ammonia_fired: f64,
    pub hydrogen_to_ammonia: f64,
    pub uhvdc: f64,
    /// Net generation `W + S + CF − curt`.
    pub generation: f64,
    /// Generation delivered directly to the link.
    pub generation_delivered: f64,
    pub capital: PartCapital,
    pub retirement: f64,
    pub coal: f64,
    pub degradation: f64,
    pub hydrogen_purchase: f64,
    pub ammonia_purchase: f64,
    pub hydrogen_revenue: f64,
    pub ammonia_revenue: f64,
    pub npc: f64,
    /// MWh per Nm³ of fuel-cell hydrogen.
    pub kappa_fc: f64,
}

/// Investment + O&M − salvage per part.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PartCapital {
    pub generation: f64,
    pub battery: f64,
    pub hydrogen: f64,
    pub ammonia: f64,
}

/// Investment + O&M per part, the numerators of the capital shares.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PartCapex {
    pub generation: f64,
    pub battery: f64,
    pub hydrogen: f64,
    pub ammonia: f64,
}

impl PresentValueLedger {
    /// `PVE^G` rebuilt from its parts.
    pub fn generation_identity(&self) -> f64 {
        self.wind + self.solar + self.coal_fired - self.curtailment
    }

    /// `PVE^{G,D}` rebuilt from its parts.
    pub fn delivered_identity(&self) -> f64 {
        self.generation - self.battery_charge - self.electrolyzer - self.synthesis
    }

    /// Energy reaching the link as accounted by the four sellers.
    pub fn supply_identity(&self) -> f64 {
        self.generation_delivered + self.battery_discharge + self.fuel_cell + self.ammonia_fired
    }
}

/// Which textual form of the part equations to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LcosOptions {
    /// Leave the degradation cost out of the battery equation.
    pub literal_degradation: bool,
    /// Debit hydrogen revenue instead of ammonia revenue in the ammonia
    /// equation.
    pub literal_ammonia_revenue: bool,
}

impl LcosOptions {
    pub fn from_inputs(inputs: &ModelInputs) -> Self {
        Self {
            literal_degradation: inputs.options.lcos_literal_degradation,
            literal_ammonia_revenue: inputs.options.lcos_literal_ammonia_revenue,
        }
    }
}

/// Internal-trading prices. Electricity prices are per MWh and the
/// hydrogen price per Nm³; `None` marks a part without output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradingPrices {
    pub lcoe_g: f64,
    pub lcos_b: Option<f64>,
    pub lcos_h: Option<f64>,
    pub lcos_a: Option<f64>,
    pub lcoh: Option<f64>,
}

/// Net present value of each part at the solved prices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PartResiduals {
    pub generation: f64,
    pub battery: Option<f64>,
    pub hydrogen: Option<f64>,
    pub ammonia: Option<f64>,
    pub hydrogen_price_link: Option<f64>,
    /// Summed NPV of the parts left unpriced. Such a part still buys
    /// electricity or sells to the market, so its NPV is generally nonzero
    /// and is carried into the reconstructed system price.
    pub unpriced_npv: f64,
}

impl PartResiduals {
    pub fn max_abs(&self) -> f64 {
        [Some(self.generation), self.battery, self.hydrogen, self.ammonia, self.hydrogen_price_link]
            .into_iter()
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LcosReport {
    pub prices: TradingPrices,
    pub residuals: PartResiduals,
    /// Delivered-energy weighted price, per MWh.
    pub lcoe_reconstructed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemIndices {
    /// NPC over the discounted link delivery, per MWh.
    pub lcoe: f64,
    pub r_curt: Option<f64>,
    pub r_reti: Option<f64>,
}

/// Capital share of each part's gross cost, internal purchases included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapexShares {
    pub generation: Option<f64>,
    pub battery: Option<f64>,
    pub hydrogen: Option<f64>,
    pub ammonia: Option<f64>,
}

pub fn build_pve_ledger(plan: &PlanSolution, inputs: &ModelInputs) -> PresentValueLedger {
    let p = &inputs.planning;
    let dt = p.timestep_hours;
    let pv = |v: OpVar| -> f64 {
        plan.stages
            .iter()
            .map(|st| {
                let sum: f64 = st.dispatch.get(v)[..p.timesteps].iter().sum();
                p.delta3(st.stage) * sum * dt
            })
            .sum()
    };
    let costs = &plan.costs;
    let sum = |v: &[f64]| v.iter().sum::<f64>();
    let capital = |part: Part| {
        let (inv, om, sav) = costs.capital_of(part);
        inv + om - sav
    };
    let mut l = PresentValueLedger {
        wind: pv(OpVar::PWind),
        solar: pv(OpVar::PSolar),
        coal_fired: pv(OpVar::PCf),
        curtailment: pv(OpVar::PCurt),
        battery_charge: pv(OpVar::PBch),
        battery_discharge: pv(OpVar::PBdisc),
        electrolyzer: pv(OpVar::PAe),
        synthesis: pv(OpVar::PAs),
        fuel_cell: pv(OpVar::PFc),
        ammonia_fired: pv(OpVar::PAf),
        hydrogen_to_ammonia: pv(OpVar::QHA),
        uhvdc: pv(OpVar::PUhvdc),
        capital: PartCapital {
            generation: capital(Part::Generation),
            battery: capital(Part::Battery),
            hydrogen: capital(Part::Hydrogen),
            ammonia: capital(Part::Ammonia),
        },
        retirement: sum(&costs.retirement),
        coal: sum(&costs.coal),
        degradation: sum(&costs.degradation),
        hydrogen_purchase: sum(&costs.hydrogen_purchase),
        ammonia_purchase: sum(&costs.ammonia_purchase),
        hydrogen_revenue: sum(&costs.hydrogen_revenue),
        ammonia_revenue: sum(&costs.ammonia_revenue),
        npc: costs.npc(),
        kappa_fc: inputs.conversion.kappa_fc,
        ..Default::default()
    };
    l.generation = l.generation_identity();
    l.generation_delivered = l.delivered_identity();
    l
}

pub fn capex_of(plan: &PlanSolution) -> PartCapex {
    let f = |part: Part| {
        let (inv, om, _) = plan.costs.capital_of(part);
        inv + om
    };
    PartCapex {
        generation: f(Part::Generation),
        battery: f(Part::Battery),
        hydrogen: f(Part::Hydrogen),
        ammonia: f(Part::Ammonia),
    }
}

const LCOE_G: usize = 0;
const LCOS_B: usize = 1;
const LCOS_H: usize = 2;
const LCOS_A: usize = 3;
const LCOH: usize = 4;

/// One linear equation `Σ coef·price + constant = 0`.
struct PartEquation {
    coef: [f64; 5],
    constant: f64,
}

impl PartEquation {
    fn eval(&self, x: &[f64; 5]) -> f64 {
        self.constant + self.coef.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }
}

fn part_equations(l: &PresentValueLedger, opts: LcosOptions) -> [PartEquation; 5] {
    let deg = if opts.literal_degradation { 0.0 } else { l.degradation };
    let ammonia_rev = if opts.literal_ammonia_revenue {
        l.hydrogen_revenue
    } else {
        l.ammonia_revenue
    };
    let eq = |pairs: &[(usize, f64)], constant: f64| {
        let mut coef = [0.0; 5];
        for &(k, v) in pairs {
            coef[k] = v;
        }
        PartEquation { coef, constant }
    };
    [
        eq(&[(LCOE_G, -l.generation)], l.capital.generation + l.retirement + l.coal),
        eq(&[(LCOE_G, l.battery_charge), (LCOS_B, -l.battery_discharge)], l.capital.battery + deg),
        eq(
            &[(LCOE_G, l.electrolyzer), (LCOH, -l.hydrogen_to_ammonia), (LCOS_H, -l.fuel_cell)],
            l.capital.hydrogen + l.hydrogen_purchase - l.hydrogen_revenue,
        ),
        eq(
            &[(LCOE_G, l.synthesis), (LCOH, l.hydrogen_to_ammonia), (LCOS_A, -l.ammonia_fired)],
            l.capital.ammonia + l.ammonia_purchase - ammonia_rev,
        ),
        eq(&[(LCOH, 1.0), (LCOS_H, -l.kappa_fc)], 0.0),
    ]
}

/// Solves the part equations for the trading prices. A part whose output is
/// negligible reports no price and its equation is dropped; the hydrogen
/// part stays priced through its sales to ammonia synthesis when the fuel
/// cell is idle.
pub fn solve_lcos_system(l: &PresentValueLedger, opts: LcosOptions) -> Result<LcosReport, MetricsError> {
    let floor = 1e-9 * l.uhvdc.abs().max(l.generation.abs());
    if !(l.generation > floor) {
        return Err(MetricsError::NoGeneration);
    }
    let equations = part_equations(l, opts);
    let battery = l.battery_discharge > floor;
    let fuel_cell = l.fuel_cell > floor;
    let to_ammonia = l.hydrogen_to_ammonia * l.kappa_fc > floor;
    let ammonia = l.ammonia_fired > floor;

    let mut unknowns = vec![LCOE_G];
    let mut rows = vec![0];
    if battery {
        unknowns.push(LCOS_B);
        rows.push(1);
    }
    if fuel_cell || to_ammonia {
        rows.push(2);
        if fuel_cell {
            unknowns.push(LCOS_H);
        }
        if to_ammonia {
            unknowns.push(LCOH);
        }
        if fuel_cell && to_ammonia {
            rows.push(4);
        }
    }
    if ammonia {
        unknowns.push(LCOS_A);
        rows.push(3);
    }
    let n = unknowns.len();
    let a = DMatrix::from_fn(n, n, |i, j| equations[rows[i]].coef[unknowns[j]]);
    let b = DVector::from_fn(n, |i, _| -equations[rows[i]].constant);
    let sol = a.lu().solve(&b).ok_or(MetricsError::Singular)?;
    let mut x = [0.0; 5];
    for (k, &u) in unknowns.iter().enumerate() {
        x[u] = sol[k];
    }
    let known = |k: usize| unknowns.contains(&k);
    // A hydrogen part that only feeds the fuel cell still quotes LCOH.
    if known(LCOS_H) && !known(LCOH) {
        x[LCOH] = l.kappa_fc * x[LCOS_H];
    }
    let prices = TradingPrices {
        lcoe_g: x[LCOE_G],
        lcos_b: known(LCOS_B).then_some(x[LCOS_B]),
        lcos_h: known(LCOS_H).then_some(x[LCOS_H]),
        lcos_a: known(LCOS_A).then_some(x[LCOS_A]),
        lcoh: (known(LCOH) || known(LCOS_H)).then_some(x[LCOH]),
    };
    let unpriced_npv = [1, 2, 3]
        .into_iter()
        .filter(|r| !rows.contains(r))
        .map(|r| equations[r].eval(&x))
        .sum();
    let residuals = PartResiduals {
        generation: equations[0].eval(&x),
        battery: battery.then(|| equations[1].eval(&x)),
        hydrogen: rows.contains(&2).then(|| equations[2].eval(&x)),
        ammonia: ammonia.then(|| equations[3].eval(&x)),
        hydrogen_price_link: rows.contains(&4).then(|| equations[4].eval(&x)),
        unpriced_npv,
    };
    let lcoe_reconstructed = if l.uhvdc != 0.0 {
        (x[LCOE_G] * l.generation_delivered
            + x[LCOS_B] * l.battery_discharge
            + x[LCOS_H] * l.fuel_cell
            + x[LCOS_A] * l.ammonia_fired
            + unpriced_npv)
            / l.uhvdc
    } else {
        f64::NAN
    };
    Ok(LcosReport {
        prices,
        residuals,
        lcoe_reconstructed,
    })
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

pub fn compute_indices(plan: &PlanSolution, inputs: &ModelInputs, ledger: &PresentValueLedger) -> SystemIndices {
    let cfpp = crate::domain::Facility::Cfpp.index();
    let retired: f64 = plan.stages.iter().map(|s| s.retired_cfpp).sum();
    let installed: f64 = inputs.facility(crate::domain::Facility::Cfpp).initial_capacity
        + plan.stages.iter().map(|s| s.added[cfpp]).sum::<f64>();
    SystemIndices {
        lcoe: ledger.npc / ledger.uhvdc,
        r_curt: ratio(ledger.curtailment, ledger.wind + ledger.solar),
        r_reti: if installed > 1e-9 { Some(retired / installed) } else { None },
    }
}

/// Capital share of each part: investment + O&M over the part's gross
/// cost, which adds its fuel, purchases and internal energy bought at the
/// trading prices.
pub fn capex_shares(ledger: &PresentValueLedger, capex: &PartCapex, prices: &TradingPrices) -> CapexShares {
    let lcoh = prices.lcoh.unwrap_or(0.0);
    let g = prices.lcoe_g;
    let share = |capex: f64, other: f64| ratio(capex, capex + other).filter(|v| v.is_finite());
    CapexShares {
        generation: share(capex.generation, ledger.retirement + ledger.coal),
        battery: share(capex.battery, ledger.degradation + g * ledger.battery_charge),
        hydrogen: share(capex.hydrogen, ledger.hydrogen_purchase + g * ledger.electrolyzer),
        ammonia: share(
            capex.ammonia,
            ledger.ammonia_purchase + g * ledger.synthesis + lcoh * ledger.hydrogen_to_ammonia,
        ),
    }
}

/// Per-kWh view of a per-MWh price.
fn per_kwh(v: f64) -> f64 {
    v / 1000.0
}

#[derive(Debug, Clone, Serialize)]
pub struct NpcBreakdown {
    pub investment: f64,
    pub om: f64,
    pub retirement: f64,
    pub coal: f64,
    pub degradation: f64,
    pub hydrogen_purchase: f64,
    pub ammonia_purchase: f64,
    pub hydrogen_revenue: f64,
    pub ammonia_revenue: f64,
    pub salvage: f64,
    pub npc: f64,
}

/// Prices in currency per kWh (LCOH per Nm³).
#[derive(Debug, Clone, Serialize)]
pub struct PriceSheet {
    pub lcoe: f64,
    pub lcoe_reconstructed: f64,
    pub lcoe_g: f64,
    pub lcos_b: Option<f64>,
    pub lcos_h: Option<f64>,
    pub lcos_a: Option<f64>,
    pub lcoh: Option<f64>,
}

/// Contents of `metrics.json`.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub currency: String,
    pub npc_breakdown: NpcBreakdown,
    pub prices_per_kwh: PriceSheet,
    pub r_curt: Option<f64>,
    pub r_reti: Option<f64>,
    pub r_capex: CapexShares,
    pub part_residuals: PartResiduals,
    pub ledger: PresentValueLedger,
    pub options: LcosOptions,
}

pub fn metrics_report(plan: &PlanSolution, inputs: &ModelInputs) -> Result<MetricsReport, MetricsError> {
    let ledger = build_pve_ledger(plan, inputs);
    let opts = LcosOptions::from_inputs(inputs);
    let lcos = solve_lcos_system(&ledger, opts)?;
    let idx = compute_indices(plan, inputs, &ledger);
    let c = &plan.costs;
    let sum = |v: &[f64]| v.iter().sum::<f64>();
    let pr = &lcos.prices;
    Ok(MetricsReport {
        currency: plan.currency.clone(),
        npc_breakdown: NpcBreakdown {
            investment: c.total_investment(),
            om: c.total_om(),
            retirement: sum(&c.retirement),
            coal: sum(&c.coal),
            degradation: sum(&c.degradation),
            hydrogen_purchase: sum(&c.hydrogen_purchase),
            ammonia_purchase: sum(&c.ammonia_purchase),
            hydrogen_revenue: sum(&c.hydrogen_revenue),
            ammonia_revenue: sum(&c.ammonia_revenue),
            salvage: c.total_salvage(),
            npc: c.npc(),
        },
        prices_per_kwh: PriceSheet {
            lcoe: per_kwh(idx.lcoe),
            lcoe_reconstructed: per_kwh(lcos.lcoe_reconstructed),
            lcoe_g: per_kwh(pr.lcoe_g),
            lcos_b: pr.lcos_b.map(per_kwh),
            lcos_h: pr.lcos_h.map(per_kwh),
            lcos_a: pr.lcos_a.map(per_kwh),
            lcoh: pr.lcoh,
        },
        r_curt: idx.r_curt,
        r_reti: idx.r_reti,
        r_capex: capex_shares(&ledger, &capex_of(plan), pr),
        part_residuals: lcos.residuals,
        ledger,
        options: opts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn storage_free() -> PresentValueLedger {
        PresentValueLedger {
            wind: 600.0,
            solar: 300.0,
            coal_fired: 200.0,
            curtailment: 100.0,
            uhvdc: 1000.0,
            generation: 1000.0,
            generation_delivered: 1000.0,
            capital: PartCapital {
                generation: 40_000.0,
                ..Default::default()
            },
            retirement: 1000.0,
            coal: 9000.0,
            npc: 50_000.0,
            kappa_fc: 1.6e-3,
            ..Default::default()
        }
    }

    #[test]
    fn storage_free_collapses_to_generation() {
        let r = solve_lcos_system(&storage_free(), LcosOptions::default()).unwrap();
        assert!((r.prices.lcoe_g - 50.0).abs() < 1e-12);
        assert_eq!(r.prices.lcos_b, None);
        assert_eq!(r.prices.lcos_h, None);
        assert_eq!(r.prices.lcos_a, None);
        assert_eq!(r.prices.lcoh, None);
        assert!((r.lcoe_reconstructed - 50.0).abs() < 1e-12);
    }

    #[test]
    fn no_generation_is_fatal() {
        let mut l = storage_free();
        l.generation = 0.0;
        assert_eq!(solve_lcos_system(&l, LcosOptions::default()).unwrap_err(), MetricsError::NoGeneration);
    }

    #[test]
    fn literal_degradation_drops_battery_term() {
        let mut l = storage_free();
        l.battery_charge = 100.0;
        l.battery_discharge = 90.0;
        l.degradation = 900.0;
        let a = solve_lcos_system(&l, LcosOptions::default()).unwrap();
        let b = solve_lcos_system(
            &l,
            LcosOptions {
                literal_degradation: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((a.prices.lcos_b.unwrap() - b.prices.lcos_b.unwrap() - 10.0).abs() < 1e-9);
    }
}
