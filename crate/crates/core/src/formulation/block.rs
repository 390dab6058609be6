//! Operational block of one planning stage in equality standard form.

use std::ops::Range;

use crate::domain::{Facility, ModelInputs, OpVar};
use crate::lp::{LpProblem, TripletBuilder};

use super::index::VariableIndexMap;
use super::transient::{setpoint_count, steps_per_interval, transient_terms};

/// Contiguous rows produced by one constraint family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowFamily {
    pub name: &'static str,
    pub rows: Range<usize>,
}

#[derive(Debug, Clone)]
pub struct StageBlock {
    pub stage: u32,
    pub problem: LpProblem,
    pub index: VariableIndexMap,
    pub families: Vec<RowFamily>,
}

impl StageBlock {
    pub fn num_rows(&self) -> usize {
        self.problem.num_rows()
    }

    pub fn dim(&self) -> usize {
        self.problem.num_cols()
    }

    pub fn family(&self, name: &str) -> Option<&RowFamily> {
        self.families.iter().find(|f| f.name == name)
    }
}

struct Rows {
    trip: TripletBuilder,
    rhs: Vec<f64>,
    families: Vec<RowFamily>,
    /// (row, coefficient) of each slack column in creation order.
    slacks: Vec<(usize, f64)>,
    open: Option<(&'static str, usize)>,
}

impl Rows {
    fn new() -> Self {
        Self {
            trip: TripletBuilder::new(),
            rhs: Vec::new(),
            families: Vec::new(),
            slacks: Vec::new(),
            open: None,
        }
    }

    fn family(&mut self, name: &'static str) {
        self.close();
        self.open = Some((name, self.rhs.len()));
    }

    fn close(&mut self) {
        if let Some((name, start)) = self.open.take() {
            self.families.push(RowFamily {
                name,
                rows: start..self.rhs.len(),
            });
        }
    }

    fn eq(&mut self, terms: &[(usize, f64)], rhs: f64) -> usize {
        let row = self.rhs.len();
        for &(c, v) in terms {
            self.trip.push(row, c, v);
        }
        self.rhs.push(rhs);
        row
    }

    /// `terms ≥ rhs`, stored as `terms − s = rhs`.
    fn ge(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let row = self.eq(terms, rhs);
        self.slacks.push((row, -1.0));
    }

    /// `terms ≤ rhs`, stored as `terms + s = rhs`.
    fn le(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let row = self.eq(terms, rhs);
        self.slacks.push((row, 1.0));
    }
}

pub fn build_stage_block(stage: u32, inputs: &ModelInputs) -> StageBlock {
    let p = &inputs.planning;
    assert!(stage >= 1 && stage <= p.stages, "stage {stage} outside the horizon");
    let si = (stage - 1) as usize;
    let n = p.timesteps;
    let dt = p.timestep_hours;
    let conv = &inputs.conversion;
    let opts = &inputs.options;
    let series = &inputs.series;

    let mut idx = VariableIndexMap::new(n, setpoint_count(inputs));
    let dim0 = idx.structural_dim();
    let mut lower = vec![0.0; dim0];
    let mut upper = vec![0.0; dim0];
    let mut cost = vec![0.0; dim0];

    let cmax = |f: Facility| inputs.facility(f).capacity_max[si];
    let band = |f: Facility| {
        let fp = inputs.facility(f);
        (fp.band_lower, fp.band_upper)
    };

    // ---- bounds ----
    for f in Facility::ALL {
        upper[idx.capacity(f)] = cmax(f);
        upper[idx.added(f)] = cmax(f);
    }
    let previous_cfpp = if stage == 1 {
        inputs.facility(Facility::Cfpp).initial_capacity
    } else {
        inputs.facility(Facility::Cfpp).capacity_max[si - 1]
    };
    upper[idx.retired()] = previous_cfpp + cmax(Facility::Cfpp);

    let rho = conv.rated_feed_per_capacity();
    let rated_max = cmax(Facility::AmmoniaSynthesis) * rho;
    let p_cfpp_max = band(Facility::Cfpp).1 * cmax(Facility::Cfpp);
    let p_ae_max = band(Facility::Electrolyzer).1 * cmax(Facility::Electrolyzer);
    let p_fc_max = band(Facility::FuelCell).1 * cmax(Facility::FuelCell);
    let q_ha_max = band(Facility::AmmoniaSynthesis).1 * rated_max;
    let b_power_max = cmax(Facility::Battery) / conv.battery_hours;
    let q_prod_max = p_ae_max / conv.kappa_ae;
    let q_fc_max = p_fc_max / conv.kappa_fc;
    let q_aprod_max = conv.gamma_h2a * q_ha_max;
    let q_agen_max = p_cfpp_max / conv.gamma_a2p;
    let (h_trade_max, a_trade_max) = if opts.trading_enabled {
        (q_prod_max + q_fc_max + q_ha_max, q_aprod_max + q_agen_max)
    } else {
        (0.0, 0.0)
    };

    let op_upper = |v: OpVar| -> f64 {
        match v {
            OpVar::PWind => cmax(Facility::Wind),
            OpVar::PSolar => cmax(Facility::Solar),
            OpVar::PCfpp | OpVar::PCf | OpVar::PAf => p_cfpp_max,
            OpVar::PUhvdc => 0.0,
            OpVar::PAe => p_ae_max,
            OpVar::PAs => conv.kappa_as * q_ha_max,
            OpVar::PFc => p_fc_max,
            OpVar::PBdisc | OpVar::PBch => b_power_max,
            OpVar::PCurt => cmax(Facility::Wind) + cmax(Facility::Solar),
            OpVar::QHProd => q_prod_max,
            OpVar::QHFc => q_fc_max,
            OpVar::QHA => q_ha_max,
            OpVar::QHPurch | OpVar::QHSell => h_trade_max,
            OpVar::QAProd => q_aprod_max,
            OpVar::QAGen => q_agen_max,
            OpVar::QAPurch | OpVar::QASell => a_trade_max,
            OpVar::EB => band(Facility::Battery).1 * cmax(Facility::Battery),
            OpVar::NHs => band(Facility::HydrogenStorage).1 * cmax(Facility::HydrogenStorage),
            OpVar::MAsto => band(Facility::AmmoniaStorage).1 * cmax(Facility::AmmoniaStorage),
        }
    };
    for v in OpVar::ALL {
        let u = op_upper(v);
        for c in idx.op_range(v) {
            upper[c] = u;
        }
    }
    for t in 0..n {
        let c = idx.op(OpVar::PUhvdc, t);
        lower[c] = series.uhvdc_mw[t];
        upper[c] = series.uhvdc_mw[t];
    }
    for c in idx.setpoint_range() {
        upper[c] = q_ha_max;
    }

    // ---- costs ----
    let d_first = p.delta1(p.first_year(stage));
    let d_stage = p.delta3(stage);
    let d_remaining = p.delta2(stage);
    let d_end = p.delta1(p.horizon_years());
    for f in Facility::ALL {
        let fp = inputs.facility(f);
        let i = fp.invest_cost[si];
        cost[idx.added(f)] =
            d_first * i + d_remaining * fp.om_fraction * i - d_end * p.salvage(stage, fp.lifetime_years) * i;
    }
    cost[idx.retired()] = d_first * inputs.prices.retirement[si];
    let deg_factor = if opts.discount_degradation { d_stage } else { 1.0 };
    let pr = &inputs.prices;
    let op_cost = |v: OpVar| -> f64 {
        match v {
            OpVar::PCf => d_stage * pr.coal[si] * conv.gamma_p2c * dt,
            OpVar::PBdisc => deg_factor * conv.degradation_cost * dt,
            OpVar::QHPurch => d_stage * pr.hydrogen_purchase[si] * dt,
            OpVar::QHSell => -d_stage * pr.hydrogen_sell[si] * dt,
            OpVar::QAPurch => d_stage * pr.ammonia_purchase[si] * dt,
            OpVar::QASell => -d_stage * pr.ammonia_sell[si] * dt,
            _ => 0.0,
        }
    };
    for v in OpVar::ALL {
        let c = op_cost(v);
        if c != 0.0 {
            for j in idx.op_range(v) {
                cost[j] = c;
            }
        }
    }

    // ---- rows ----
    let mut rows = Rows::new();
    let op = |v: OpVar, t: usize| idx.op(v, t);
    let cap = |f: Facility| idx.capacity(f);

    // Band rows `lower·C ≤ x ≤ upper·C`; the lower row is omitted when the
    // lower fraction is zero because the variable bound already covers it.
    fn band_rows(rows: &mut Rows, x: usize, capacity: usize, lo: f64, hi: f64) {
        if lo > 0.0 {
            rows.ge(&[(x, 1.0), (capacity, -lo)], 0.0);
        }
        rows.le(&[(x, 1.0), (capacity, -hi)], 0.0);
    }

    if stage == 1 {
        rows.family("capacity_initial");
        for f in Facility::ALL {
            let mut terms = vec![(cap(f), 1.0), (idx.added(f), -1.0)];
            if f == Facility::Cfpp {
                terms.push((idx.retired(), 1.0));
            }
            rows.eq(&terms, inputs.facility(f).initial_capacity);
        }
    }

    rows.family("ae_conversion");
    for t in 0..n {
        rows.eq(&[(op(OpVar::PAe, t), 1.0), (op(OpVar::QHProd, t), -conv.kappa_ae)], 0.0);
    }
    rows.family("ae_band");
    let (lo, hi) = band(Facility::Electrolyzer);
    for t in 0..n {
        band_rows(&mut rows, op(OpVar::PAe, t), cap(Facility::Electrolyzer), lo, hi);
    }

    rows.family("hs_inventory");
    for t in 0..n {
        rows.eq(
            &[
                (op(OpVar::NHs, t + 1), 1.0),
                (op(OpVar::NHs, t), -1.0),
                (op(OpVar::QHProd, t), -dt),
                (op(OpVar::QHPurch, t), -dt),
                (op(OpVar::QHFc, t), dt),
                (op(OpVar::QHSell, t), dt),
                (op(OpVar::QHA, t), dt),
            ],
            0.0,
        );
    }
    rows.family("hs_band");
    let (lo, hi) = band(Facility::HydrogenStorage);
    for t in 0..n {
        band_rows(&mut rows, op(OpVar::NHs, t), cap(Facility::HydrogenStorage), lo, hi);
    }
    rows.family("hs_periodicity");
    rows.eq(&[(op(OpVar::NHs, 0), 1.0), (op(OpVar::NHs, n), -1.0)], 0.0);

    rows.family("fc_conversion");
    for t in 0..n {
        rows.eq(&[(op(OpVar::PFc, t), 1.0), (op(OpVar::QHFc, t), -conv.kappa_fc)], 0.0);
    }
    rows.family("fc_band");
    let (lo, hi) = band(Facility::FuelCell);
    for t in 0..n {
        band_rows(&mut rows, op(OpVar::PFc, t), cap(Facility::FuelCell), lo, hi);
    }

    rows.family("as_conversion");
    for t in 0..n {
        rows.eq(&[(op(OpVar::PAs, t), 1.0), (op(OpVar::QHA, t), -conv.kappa_as)], 0.0);
    }
    if idx.setpoint_count > 0 {
        rows.family("as_transient");
        let m = steps_per_interval(conv.synthesis_interval_h, dt).expect("validated synthesis interval");
        for term in transient_terms(n, dt, m, conv.transient_time_h, opts.transient_absolute_time) {
            if term.k == term.k_next {
                rows.eq(&[(op(OpVar::QHA, term.t), 1.0), (idx.setpoint(term.k), -1.0)], 0.0);
            } else {
                rows.eq(
                    &[
                        (op(OpVar::QHA, term.t), 1.0),
                        (idx.setpoint(term.k), -term.w_current),
                        (idx.setpoint(term.k_next), -term.w_next),
                    ],
                    0.0,
                );
            }
        }
    }
    rows.family("as_band");
    let (lo, hi) = band(Facility::AmmoniaSynthesis);
    let c_as = cap(Facility::AmmoniaSynthesis);
    for t in 0..n {
        band_rows(&mut rows, op(OpVar::QHA, t), c_as, lo * rho, hi * rho);
    }
    rows.family("as_ramp");
    for t in 0..n.saturating_sub(1) {
        let step = [(op(OpVar::QHA, t + 1), 1.0), (op(OpVar::QHA, t), -1.0)];
        rows.ge(&[step[0], step[1], (c_as, -conv.ramp_down * rho)], 0.0);
        rows.le(&[step[0], step[1], (c_as, -conv.ramp_up * rho)], 0.0);
    }
    rows.family("ammonia_stoichiometry");
    for t in 0..n {
        rows.eq(&[(op(OpVar::QAProd, t), 1.0), (op(OpVar::QHA, t), -conv.gamma_h2a)], 0.0);
    }
    rows.family("asto_inventory");
    for t in 0..n {
        rows.eq(
            &[
                (op(OpVar::MAsto, t + 1), 1.0),
                (op(OpVar::MAsto, t), -1.0),
                (op(OpVar::QAProd, t), -dt),
                (op(OpVar::QAPurch, t), -dt),
                (op(OpVar::QAGen, t), dt),
                (op(OpVar::QASell, t), dt),
            ],
            0.0,
        );
    }
    rows.family("asto_band");
    let (lo, hi) = band(Facility::AmmoniaStorage);
    for t in 0..n {
        band_rows(&mut rows, op(OpVar::MAsto, t), cap(Facility::AmmoniaStorage), lo, hi);
    }
    rows.family("asto_periodicity");
    rows.eq(&[(op(OpVar::MAsto, 0), 1.0), (op(OpVar::MAsto, n), -1.0)], 0.0);
    rows.family("ammonia_to_power");
    for t in 0..n {
        rows.eq(&[(op(OpVar::PAf, t), 1.0), (op(OpVar::QAGen, t), -conv.gamma_a2p)], 0.0);
    }

    rows.family("trading_constancy");
    for v in [OpVar::QHPurch, OpVar::QHSell, OpVar::QAPurch, OpVar::QASell] {
        for t in 0..n.saturating_sub(1) {
            rows.eq(&[(op(v, t + 1), 1.0), (op(v, t), -1.0)], 0.0);
        }
    }

    rows.family("bess_inventory");
    let eta = conv.battery_efficiency;
    for t in 0..n {
        rows.eq(
            &[
                (op(OpVar::EB, t + 1), 1.0),
                (op(OpVar::EB, t), -(1.0 - conv.battery_self_discharge)),
                (op(OpVar::PBch, t), -eta * dt),
                (op(OpVar::PBdisc, t), dt / eta),
            ],
            0.0,
        );
    }
    rows.family("bess_band");
    let (lo, hi) = band(Facility::Battery);
    for t in 0..n {
        band_rows(&mut rows, op(OpVar::EB, t), cap(Facility::Battery), lo, hi);
    }
    rows.family("bess_periodicity");
    rows.eq(&[(op(OpVar::EB, 0), 1.0), (op(OpVar::EB, n), -1.0)], 0.0);
    rows.family("bess_power");
    let per_hour = 1.0 / conv.battery_hours;
    for t in 0..n {
        rows.le(&[(op(OpVar::PBch, t), 1.0), (cap(Facility::Battery), -per_hour)], 0.0);
        rows.le(&[(op(OpVar::PBdisc, t), 1.0), (cap(Facility::Battery), -per_hour)], 0.0);
    }

    rows.family("cfpp_split");
    for t in 0..n {
        rows.eq(
            &[(op(OpVar::PCfpp, t), 1.0), (op(OpVar::PCf, t), -1.0), (op(OpVar::PAf, t), -1.0)],
            0.0,
        );
    }
    rows.family("cfpp_band");
    let (lo, hi) = band(Facility::Cfpp);
    for t in 0..n {
        band_rows(&mut rows, op(OpVar::PCfpp, t), cap(Facility::Cfpp), lo, hi);
    }

    rows.family("renewable_availability");
    for t in 0..n {
        rows.eq(&[(op(OpVar::PWind, t), 1.0), (cap(Facility::Wind), -series.wind_pu[t])], 0.0);
        rows.eq(&[(op(OpVar::PSolar, t), 1.0), (cap(Facility::Solar), -series.solar_pu[t])], 0.0);
    }
    rows.family("power_balance");
    for t in 0..n {
        rows.eq(
            &[
                (op(OpVar::PWind, t), 1.0),
                (op(OpVar::PSolar, t), 1.0),
                (op(OpVar::PCf, t), 1.0),
                (op(OpVar::PBdisc, t), 1.0),
                (op(OpVar::PFc, t), 1.0),
                (op(OpVar::PAf, t), 1.0),
                (op(OpVar::PUhvdc, t), -1.0),
                (op(OpVar::PAe, t), -1.0),
                (op(OpVar::PAs, t), -1.0),
                (op(OpVar::PBch, t), -1.0),
                (op(OpVar::PCurt, t), -1.0),
            ],
            0.0,
        );
    }
    rows.family("curtailment_cap");
    for t in 0..n {
        rows.le(
            &[(op(OpVar::PCurt, t), 1.0), (op(OpVar::PWind, t), -1.0), (op(OpVar::PSolar, t), -1.0)],
            0.0,
        );
    }
    rows.family("carbon_cap");
    let budget = inputs.baseline_emissions() * (1.0 - p.cer_targets[si]);
    let terms: Vec<(usize, f64)> = (0..n).map(|t| (op(OpVar::PCf, t), conv.mu_cf * dt)).collect();
    rows.le(&terms, budget);
    rows.close();

    // ---- slack columns ----
    idx.set_slack_count(rows.slacks.len());
    let structural = rows.trip.entries().to_vec();
    let nrows = rows.rhs.len();
    let mut row_lo = vec![0.0; nrows];
    let mut row_hi = vec![0.0; nrows];
    for &(r, c, v) in &structural {
        let (a, b) = (v * lower[c], v * upper[c]);
        row_lo[r] += a.min(b);
        row_hi[r] += a.max(b);
    }
    for (k, &(r, sign)) in rows.slacks.iter().enumerate() {
        let col = dim0 + k;
        rows.trip.push(r, col, sign);
        let span = if sign < 0.0 {
            row_hi[r] - rows.rhs[r]
        } else {
            rows.rhs[r] - row_lo[r]
        };
        lower.push(0.0);
        upper.push(span.max(0.0));
        cost.push(0.0);
    }

    let a = rows.trip.build(nrows, idx.dim());
    StageBlock {
        stage,
        problem: LpProblem::new(a, rows.rhs, cost, lower, upper),
        index: idx,
        families: rows.families,
    }
}
