//! Physical and economic inputs, time series and solution records.
//!
//! Internal units: power MW, energy MWh, hydrogen flow Nm³/h, hydrogen
//! inventory Nm³, ammonia flow t/h, ammonia inventory t, ammonia synthesis
//! capacity t/yr, currency as declared by the config. The config loader
//! converts everything else on the way in.

pub mod config;
pub mod discount;
pub mod plan;
pub mod series;
pub mod validate;

use serde::{Deserialize, Serialize};

pub use config::{load_config, ConfigError, RawConfig};
pub use plan::{CostBreakdown, Diagnostics, OpVar, PlanSolution, StageDispatch, StagePlan};
pub use series::{load_series, write_series, TimeSeriesBundle};
pub use validate::{validate_inputs, Issue, Severity, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Facility {
    Wind,
    Solar,
    Cfpp,
    Battery,
    Electrolyzer,
    HydrogenStorage,
    FuelCell,
    AmmoniaSynthesis,
    AmmoniaStorage,
}

/// What a facility's capacity measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityKind {
    /// MW
    Power,
    /// MWh
    Energy,
    /// Nm³
    HydrogenVolume,
    /// t/yr
    AmmoniaRate,
    /// t
    AmmoniaMass,
}

impl Facility {
    pub const ALL: [Facility; 9] = [
        Facility::Wind,
        Facility::Solar,
        Facility::Cfpp,
        Facility::Battery,
        Facility::Electrolyzer,
        Facility::HydrogenStorage,
        Facility::FuelCell,
        Facility::AmmoniaSynthesis,
        Facility::AmmoniaStorage,
    ];

    pub const COUNT: usize = 9;

    pub fn index(self) -> usize {
        self as usize
    }

    /// Config table name.
    pub fn key(self) -> &'static str {
        match self {
            Facility::Wind => "wind",
            Facility::Solar => "solar",
            Facility::Cfpp => "cfpp",
            Facility::Battery => "battery",
            Facility::Electrolyzer => "electrolyzer",
            Facility::HydrogenStorage => "hydrogen_storage",
            Facility::FuelCell => "fuel_cell",
            Facility::AmmoniaSynthesis => "ammonia_synthesis",
            Facility::AmmoniaStorage => "ammonia_storage",
        }
    }

    /// Short label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Facility::Wind => "W",
            Facility::Solar => "S",
            Facility::Cfpp => "CFPP",
            Facility::Battery => "B",
            Facility::Electrolyzer => "AE",
            Facility::HydrogenStorage => "HS",
            Facility::FuelCell => "FC",
            Facility::AmmoniaSynthesis => "ASyn",
            Facility::AmmoniaStorage => "ASto",
        }
    }

    pub fn capacity_kind(self) -> CapacityKind {
        match self {
            Facility::Wind | Facility::Solar | Facility::Cfpp | Facility::Electrolyzer | Facility::FuelCell => {
                CapacityKind::Power
            }
            Facility::Battery => CapacityKind::Energy,
            Facility::HydrogenStorage => CapacityKind::HydrogenVolume,
            Facility::AmmoniaSynthesis => CapacityKind::AmmoniaRate,
            Facility::AmmoniaStorage => CapacityKind::AmmoniaMass,
        }
    }

    pub fn from_key(key: &str) -> Option<Facility> {
        Facility::ALL.into_iter().find(|f| f.key() == key)
    }
}

/// Facility groups used for cost attribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Generation,
    Battery,
    Hydrogen,
    Ammonia,
}

impl Part {
    pub const ALL: [Part; 4] = [Part::Generation, Part::Battery, Part::Hydrogen, Part::Ammonia];

    pub fn of(f: Facility) -> Part {
        match f {
            Facility::Wind | Facility::Solar | Facility::Cfpp => Part::Generation,
            Facility::Battery => Part::Battery,
            Facility::Electrolyzer | Facility::HydrogenStorage | Facility::FuelCell => Part::Hydrogen,
            Facility::AmmoniaSynthesis | Facility::AmmoniaStorage => Part::Ammonia,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanningConfig {
    pub stages: u32,
    pub years_per_stage: u32,
    pub timesteps: usize,
    pub timestep_hours: f64,
    pub interest_rate: f64,
    /// Fractional emission reduction per stage.
    pub cer_targets: Vec<f64>,
    pub epsilon: f64,
    pub max_iterations: usize,
}

impl PlanningConfig {
    pub fn delta1(&self, year: u32) -> f64 {
        discount::delta1(year, self.interest_rate)
    }

    pub fn delta2(&self, stage: u32) -> f64 {
        discount::delta2(stage, self.stages, self.years_per_stage, self.interest_rate)
    }

    pub fn delta3(&self, stage: u32) -> f64 {
        discount::delta3(stage, self.years_per_stage, self.interest_rate)
    }

    pub fn salvage(&self, stage: u32, lifetime_years: u32) -> f64 {
        discount::salvage_fraction(stage, lifetime_years, self.stages, self.years_per_stage)
    }

    /// First year of stage `s`.
    pub fn first_year(&self, stage: u32) -> u32 {
        (stage - 1) * self.years_per_stage + 1
    }

    pub fn horizon_years(&self) -> u32 {
        self.stages * self.years_per_stage
    }
}

/// Investment and operating envelope of one facility, internal units,
/// stage-indexed vectors of length `stages`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacilityParams {
    pub invest_cost: Vec<f64>,
    pub om_fraction: f64,
    pub lifetime_years: u32,
    pub capacity_max: Vec<f64>,
    pub band_lower: f64,
    pub band_upper: f64,
    pub initial_capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConversionParams {
    /// MWh per Nm³ drawn by the electrolyzer.
    pub kappa_ae: f64,
    /// MWh per Nm³ delivered by the fuel cell.
    pub kappa_fc: f64,
    /// MWh per Nm³ fed to ammonia synthesis.
    pub kappa_as: f64,
    /// t ammonia per Nm³ hydrogen.
    pub gamma_h2a: f64,
    /// MWh per t ammonia fired.
    pub gamma_a2p: f64,
    /// t coal per MWh.
    pub gamma_p2c: f64,
    /// t CO₂ per MWh coal-fired.
    pub mu_cf: f64,
    pub battery_self_discharge: f64,
    pub battery_efficiency: f64,
    pub battery_hours: f64,
    /// Currency per MWh discharged.
    pub degradation_cost: f64,
    /// Ramp limits as fractions of the rated feed per step.
    pub ramp_down: f64,
    pub ramp_up: f64,
    pub transient_time_h: f64,
    pub synthesis_interval_h: f64,
    pub synthesis_full_load_hours: f64,
}

impl ConversionParams {
    /// Rated hydrogen feed (Nm³/h) per unit of synthesis capacity (t/yr).
    pub fn rated_feed_per_capacity(&self) -> f64 {
        1.0 / (self.synthesis_full_load_hours * self.gamma_h2a)
    }
}

/// Stage-indexed prices in internal units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceSchedule {
    /// per t coal
    pub coal: Vec<f64>,
    /// per Nm³
    pub hydrogen_purchase: Vec<f64>,
    pub hydrogen_sell: Vec<f64>,
    /// per t
    pub ammonia_purchase: Vec<f64>,
    pub ammonia_sell: Vec<f64>,
    /// per MW retired
    pub retirement: Vec<f64>,
}

/// Formulation switches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelOptions {
    pub as_transient: bool,
    /// Measure the transient decay from the start of the year instead of the
    /// start of each synthesis interval.
    pub transient_absolute_time: bool,
    pub discount_degradation: bool,
    pub trading_enabled: bool,
    /// Leave degradation cost out of the battery part's NPV equation.
    pub lcos_literal_degradation: bool,
    /// Debit hydrogen revenue (instead of ammonia revenue) in the ammonia part.
    pub lcos_literal_ammonia_revenue: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            as_transient: true,
            transient_absolute_time: false,
            discount_degradation: true,
            trading_enabled: true,
            lcos_literal_degradation: false,
            lcos_literal_ammonia_revenue: false,
        }
    }
}

impl ModelOptions {
    pub fn set_paper_literal(&mut self) {
        self.transient_absolute_time = true;
        self.discount_degradation = false;
        self.lcos_literal_degradation = true;
        self.lcos_literal_ammonia_revenue = true;
    }
}

/// Everything the formulation needs, already in internal units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelInputs {
    pub currency: String,
    pub planning: PlanningConfig,
    pub facilities: Vec<FacilityParams>,
    pub conversion: ConversionParams,
    pub prices: PriceSchedule,
    pub options: ModelOptions,
    #[serde(skip)]
    pub series: TimeSeriesBundle,
}

impl ModelInputs {
    pub fn facility(&self, f: Facility) -> &FacilityParams {
        &self.facilities[f.index()]
    }

    pub fn facility_mut(&mut self, f: Facility) -> &mut FacilityParams {
        &mut self.facilities[f.index()]
    }

    /// Baseline emissions in t.
    pub fn baseline_emissions(&self) -> f64 {
        discount::baseline_emissions(&self.series.uhvdc_mw, self.planning.timestep_hours, self.conversion.mu_cf)
    }

    /// Zeroes the capacity limits of the hydrogen and ammonia chains and
    /// disables trading, leaving the battery as the only storage.
    pub fn restrict_to_battery_storage(&mut self) {
        for f in [
            Facility::Electrolyzer,
            Facility::HydrogenStorage,
            Facility::FuelCell,
            Facility::AmmoniaSynthesis,
            Facility::AmmoniaStorage,
        ] {
            let p = self.facility_mut(f);
            p.capacity_max.iter_mut().for_each(|c| *c = 0.0);
            p.initial_capacity = 0.0;
        }
        self.options.trading_enabled = false;
    }

    /// Per-stage targets rising linearly from 0 to `final_target`.
    pub fn set_linear_cer(&mut self, final_target: f64) {
        let s = self.planning.stages as usize;
        self.planning.cer_targets = (0..s)
            .map(|i| if s == 1 { final_target } else { final_target * i as f64 / (s - 1) as f64 })
            .collect();
    }
}
