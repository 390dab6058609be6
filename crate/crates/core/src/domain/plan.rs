//! Solution records: capacities, dispatch trajectories and cost terms.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{Facility, Part};
use crate::lp::LpStatus;

/// Operational series of one stage, in internal units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpVar {
    PWind,
    PSolar,
    PCfpp,
    PUhvdc,
    PAe,
    PAs,
    PFc,
    PBdisc,
    PBch,
    PCurt,
    PCf,
    PAf,
    QHProd,
    QHPurch,
    QHFc,
    QHSell,
    QHA,
    QAProd,
    QAPurch,
    QAGen,
    QASell,
    EB,
    NHs,
    MAsto,
}

impl OpVar {
    pub const ALL: [OpVar; 24] = [
        OpVar::PWind,
        OpVar::PSolar,
        OpVar::PCfpp,
        OpVar::PUhvdc,
        OpVar::PAe,
        OpVar::PAs,
        OpVar::PFc,
        OpVar::PBdisc,
        OpVar::PBch,
        OpVar::PCurt,
        OpVar::PCf,
        OpVar::PAf,
        OpVar::QHProd,
        OpVar::QHPurch,
        OpVar::QHFc,
        OpVar::QHSell,
        OpVar::QHA,
        OpVar::QAProd,
        OpVar::QAPurch,
        OpVar::QAGen,
        OpVar::QASell,
        OpVar::EB,
        OpVar::NHs,
        OpVar::MAsto,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Inventories carry `N+1` samples, everything else `N`.
    pub fn is_state(self) -> bool {
        matches!(self, OpVar::EB | OpVar::NHs | OpVar::MAsto)
    }

    pub fn name(self) -> &'static str {
        match self {
            OpVar::PWind => "p_wind_mw",
            OpVar::PSolar => "p_solar_mw",
            OpVar::PCfpp => "p_cfpp_mw",
            OpVar::PUhvdc => "p_uhvdc_mw",
            OpVar::PAe => "p_ae_mw",
            OpVar::PAs => "p_as_mw",
            OpVar::PFc => "p_fc_mw",
            OpVar::PBdisc => "p_b_disc_mw",
            OpVar::PBch => "p_b_ch_mw",
            OpVar::PCurt => "p_curt_mw",
            OpVar::PCf => "p_cf_mw",
            OpVar::PAf => "p_af_mw",
            OpVar::QHProd => "q_h_prod_nm3h",
            OpVar::QHPurch => "q_h_purch_nm3h",
            OpVar::QHFc => "q_h_fc_nm3h",
            OpVar::QHSell => "q_h_sell_nm3h",
            OpVar::QHA => "q_h_a_nm3h",
            OpVar::QAProd => "q_a_prod_th",
            OpVar::QAPurch => "q_a_purch_th",
            OpVar::QAGen => "q_a_gen_th",
            OpVar::QASell => "q_a_sell_th",
            OpVar::EB => "e_b_mwh",
            OpVar::NHs => "n_hs_nm3",
            OpVar::MAsto => "m_asto_t",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageDispatch {
    /// Indexed by [`OpVar::index`].
    pub series: Vec<Vec<f64>>,
    /// Synthesis setpoints, empty when the transient model is off.
    pub setpoints: Vec<f64>,
}

impl StageDispatch {
    pub fn get(&self, v: OpVar) -> &[f64] {
        &self.series[v.index()]
    }
}

impl Serialize for StageDispatch {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(OpVar::ALL.len() + 1))?;
        for v in OpVar::ALL {
            m.serialize_entry(v.name(), &self.series[v.index()])?;
        }
        m.serialize_entry("q_h_setpoint_nm3h", &self.setpoints)?;
        m.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagePlan {
    pub stage: u32,
    /// Indexed by facility order.
    pub capacity: Vec<f64>,
    pub added: Vec<f64>,
    pub retired_cfpp: f64,
    pub dispatch: StageDispatch,
}

/// Present-value cost terms, per stage (and per facility where relevant).
/// Revenues and salvage are stored as positive amounts.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub investment: Vec<Vec<f64>>,
    pub om: Vec<Vec<f64>>,
    pub salvage: Vec<Vec<f64>>,
    pub retirement: Vec<f64>,
    pub coal: Vec<f64>,
    pub degradation: Vec<f64>,
    pub hydrogen_purchase: Vec<f64>,
    pub ammonia_purchase: Vec<f64>,
    pub hydrogen_revenue: Vec<f64>,
    pub ammonia_revenue: Vec<f64>,
}

impl CostBreakdown {
    pub fn total_investment(&self) -> f64 {
        self.investment.iter().flatten().sum()
    }

    pub fn total_om(&self) -> f64 {
        self.om.iter().flatten().sum()
    }

    pub fn total_salvage(&self) -> f64 {
        self.salvage.iter().flatten().sum()
    }

    /// Investment + O&M − salvage over the facilities of `part`.
    pub fn capital_of(&self, part: Part) -> (f64, f64, f64) {
        let mut inv = 0.0;
        let mut om = 0.0;
        let mut sav = 0.0;
        for f in Facility::ALL.into_iter().filter(|f| Part::of(*f) == part) {
            let j = f.index();
            inv += self.investment.iter().map(|r| r[j]).sum::<f64>();
            om += self.om.iter().map(|r| r[j]).sum::<f64>();
            sav += self.salvage.iter().map(|r| r[j]).sum::<f64>();
        }
        (inv, om, sav)
    }

    /// Net present cost assembled term by term.
    pub fn npc(&self) -> f64 {
        let sum = |v: &[f64]| v.iter().sum::<f64>();
        self.total_investment() + self.total_om() + sum(&self.retirement) + sum(&self.coal) + sum(&self.degradation)
            + sum(&self.hydrogen_purchase)
            + sum(&self.ammonia_purchase)
            - sum(&self.hydrogen_revenue)
            - sum(&self.ammonia_revenue)
            - self.total_salvage()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub mode: String,
    pub backend: String,
    pub status: LpStatus,
    pub iterations: usize,
    pub final_gap: Option<f64>,
    /// Excluded from `plan.json` so repeated runs serialize identically;
    /// reported in the manifest instead.
    #[serde(skip)]
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanSolution {
    pub currency: String,
    pub facility_order: Vec<&'static str>,
    /// Objective value reported by the solver.
    pub objective: f64,
    pub stages: Vec<StagePlan>,
    pub costs: CostBreakdown,
    pub diagnostics: Diagnostics,
}

impl PlanSolution {
    pub fn npc(&self) -> f64 {
        self.costs.npc()
    }

    pub fn stage(&self, s: u32) -> &StagePlan {
        &self.stages[(s - 1) as usize]
    }
}
