//! TOML configuration schema and conversion to internal units.
//!
//! Field names carry their units (`kappa_ae_kwh_per_nm3`, `coal_per_kg`).
//! Facility costs and limits declare theirs explicitly through `cost_basis`
//! and `capacity_unit`. Stage-dependent values accept a scalar, a list with
//! one entry per stage, or `{ start, end }` for linear interpolation in the
//! stage index.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::validate::{validate_inputs, Issue, ValidationReport};
use super::{
    CapacityKind, ConversionParams, Facility, FacilityParams, ModelInputs, ModelOptions, PlanningConfig,
    PriceSchedule, TimeSeriesBundle,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("config parse error: {0}")]
    Toml(String),
    #[error("time series: {0}")]
    Series(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("input validation failed:\n{0}")]
    Validation(ValidationReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StageValue {
    Scalar(f64),
    List(Vec<f64>),
    Linear { start: f64, end: f64 },
}

impl StageValue {
    pub fn resolve(&self, stages: usize, what: &str) -> Result<Vec<f64>, ConfigError> {
        match self {
            StageValue::Scalar(v) => Ok(vec![*v; stages]),
            StageValue::List(v) if v.len() == stages => Ok(v.clone()),
            StageValue::List(v) => Err(ConfigError::Invalid(format!(
                "{what}: {} values given for {stages} stages",
                v.len()
            ))),
            StageValue::Linear { start, end } => Ok((0..stages)
                .map(|i| {
                    if stages == 1 {
                        *start
                    } else {
                        start + (end - start) * i as f64 / (stages - 1) as f64
                    }
                })
                .collect()),
        }
    }
}

fn default_currency() -> String {
    "RMB".into()
}
fn default_dt() -> f64 {
    1.0
}
fn default_rate() -> f64 {
    0.08
}
fn default_cer() -> StageValue {
    StageValue::Scalar(0.0)
}
fn default_epsilon() -> f64 {
    1e-4
}
fn default_max_iterations() -> usize {
    500
}
fn default_true() -> bool {
    true
}
fn default_flh() -> f64 {
    8000.0
}
fn default_band() -> [f64; 2] {
    [0.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default = "default_currency")]
    pub currency: String,
    /// Time-series CSV, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<PathBuf>,
    pub planning: RawPlanning,
    #[serde(default)]
    pub options: RawOptions,
    pub conversion: RawConversion,
    pub prices: RawPrices,
    pub facilities: BTreeMap<String, RawFacility>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPlanning {
    pub stages: u32,
    pub years_per_stage: u32,
    pub timesteps: usize,
    #[serde(default = "default_dt")]
    pub timestep_hours: f64,
    #[serde(default = "default_rate")]
    pub interest_rate: f64,
    #[serde(default = "default_cer")]
    pub cer_targets: StageValue,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOptions {
    #[serde(default = "default_true")]
    pub as_transient: bool,
    #[serde(default = "default_true")]
    pub discount_degradation: bool,
    #[serde(default = "default_true")]
    pub trading_enabled: bool,
    #[serde(default)]
    pub paper_literal: bool,
}

impl Default for RawOptions {
    fn default() -> Self {
        Self {
            as_transient: true,
            discount_degradation: true,
            trading_enabled: true,
            paper_literal: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConversion {
    pub kappa_ae_kwh_per_nm3: f64,
    pub kappa_fc_kwh_per_nm3: f64,
    pub kappa_as_kwh_per_nm3: f64,
    pub gamma_h2a_t_per_nm3: f64,
    pub gamma_a2p_kwh_per_t: f64,
    pub gamma_p2c_kg_per_kwh: f64,
    pub mu_cf_kg_per_kwh: f64,
    pub battery_self_discharge_per_step: f64,
    pub battery_efficiency: f64,
    pub battery_hours: f64,
    pub battery_degradation_cost_per_kwh: f64,
    pub as_ramp_down_per_step: f64,
    pub as_ramp_up_per_step: f64,
    pub as_transient_time_h: f64,
    pub as_interval_h: f64,
    #[serde(default = "default_flh")]
    pub as_full_load_hours: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPrices {
    pub coal_per_kg: StageValue,
    pub hydrogen_purchase_per_nm3: StageValue,
    pub hydrogen_sell_per_nm3: StageValue,
    pub ammonia_purchase_per_t: StageValue,
    pub ammonia_sell_per_t: StageValue,
    pub cfpp_retirement_per_kw: StageValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFacility {
    /// Currency per `cost_basis` unit of capacity.
    pub invest_cost: StageValue,
    pub cost_basis: String,
    pub om_fraction: f64,
    pub lifetime_years: u32,
    pub capacity_unit: String,
    pub capacity_max: StageValue,
    #[serde(default)]
    pub initial_capacity: f64,
    /// Operating band `[lower, upper]` as fractions of capacity.
    #[serde(default = "default_band")]
    pub band: [f64; 2],
}

/// Multiplier from `unit` to the internal unit of `kind`.
pub fn unit_factor(kind: CapacityKind, unit: &str) -> Option<f64> {
    let u = unit.replace('³', "3").replace(' ', "");
    let u = u.as_str();
    match kind {
        CapacityKind::Power => match u {
            "kW" => Some(1e-3),
            "MW" => Some(1.0),
            "GW" => Some(1e3),
            _ => None,
        },
        CapacityKind::Energy => match u {
            "kWh" => Some(1e-3),
            "MWh" => Some(1.0),
            "GWh" => Some(1e3),
            _ => None,
        },
        CapacityKind::HydrogenVolume => match u {
            "Nm3" => Some(1.0),
            "kNm3" => Some(1e3),
            "MNm3" => Some(1e6),
            _ => None,
        },
        CapacityKind::AmmoniaRate => match u {
            "t/yr" => Some(1.0),
            "kt/yr" => Some(1e3),
            "Mt/yr" => Some(1e6),
            _ => None,
        },
        CapacityKind::AmmoniaMass => match u {
            "t" => Some(1.0),
            "kt" => Some(1e3),
            "Mt" => Some(1e6),
            _ => None,
        },
    }
}

impl RawConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Toml(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Converts to internal units and validates against `series`. Fatal
    /// issues are returned as [`ConfigError::Validation`]; warnings are
    /// returned alongside the inputs.
    pub fn resolve(&self, series: TimeSeriesBundle) -> Result<(ModelInputs, ValidationReport), ConfigError> {
        let p = &self.planning;
        let stages = p.stages.max(1) as usize;
        let mut report = ValidationReport::default();

        let planning = PlanningConfig {
            stages: p.stages,
            years_per_stage: p.years_per_stage,
            timesteps: p.timesteps,
            timestep_hours: p.timestep_hours,
            interest_rate: p.interest_rate,
            cer_targets: p.cer_targets.resolve(stages, "planning.cer_targets")?,
            epsilon: p.epsilon,
            max_iterations: p.max_iterations,
        };

        for key in self.facilities.keys() {
            if Facility::from_key(key).is_none() {
                report.push(Issue::fatal("unknown_facility", format!("unknown facility table `{key}`")));
            }
        }
        let mut facilities = Vec::with_capacity(Facility::COUNT);
        for f in Facility::ALL {
            let Some(raw) = self.facilities.get(f.key()) else {
                report.push(Issue::fatal(
                    "missing_facility",
                    format!("facility `{}` missing from catalog", f.key()),
                ));
                facilities.push(FacilityParams {
                    invest_cost: vec![0.0; stages],
                    om_fraction: 0.0,
                    lifetime_years: 1,
                    capacity_max: vec![0.0; stages],
                    band_lower: 0.0,
                    band_upper: 1.0,
                    initial_capacity: 0.0,
                });
                continue;
            };
            let kind = f.capacity_kind();
            let cap = unit_factor(kind, &raw.capacity_unit).ok_or_else(|| {
                ConfigError::Invalid(format!("{}: unsupported capacity_unit `{}`", f.key(), raw.capacity_unit))
            })?;
            let basis = unit_factor(kind, &raw.cost_basis).ok_or_else(|| {
                ConfigError::Invalid(format!("{}: unsupported cost_basis `{}`", f.key(), raw.cost_basis))
            })?;
            let label = |field: &str| format!("facilities.{}.{field}", f.key());
            facilities.push(FacilityParams {
                invest_cost: raw
                    .invest_cost
                    .resolve(stages, &label("invest_cost"))?
                    .into_iter()
                    .map(|c| c / basis)
                    .collect(),
                om_fraction: raw.om_fraction,
                lifetime_years: raw.lifetime_years,
                capacity_max: raw
                    .capacity_max
                    .resolve(stages, &label("capacity_max"))?
                    .into_iter()
                    .map(|c| c * cap)
                    .collect(),
                band_lower: raw.band[0],
                band_upper: raw.band[1],
                initial_capacity: raw.initial_capacity * cap,
            });
        }

        let c = &self.conversion;
        let conversion = ConversionParams {
            kappa_ae: c.kappa_ae_kwh_per_nm3 / 1000.0,
            kappa_fc: c.kappa_fc_kwh_per_nm3 / 1000.0,
            kappa_as: c.kappa_as_kwh_per_nm3 / 1000.0,
            gamma_h2a: c.gamma_h2a_t_per_nm3,
            gamma_a2p: c.gamma_a2p_kwh_per_t / 1000.0,
            // kg/kWh equals t/MWh
            gamma_p2c: c.gamma_p2c_kg_per_kwh,
            mu_cf: c.mu_cf_kg_per_kwh,
            battery_self_discharge: c.battery_self_discharge_per_step,
            battery_efficiency: c.battery_efficiency,
            battery_hours: c.battery_hours,
            degradation_cost: c.battery_degradation_cost_per_kwh * 1000.0,
            ramp_down: c.as_ramp_down_per_step,
            ramp_up: c.as_ramp_up_per_step,
            transient_time_h: c.as_transient_time_h,
            synthesis_interval_h: c.as_interval_h,
            synthesis_full_load_hours: c.as_full_load_hours,
        };

        let r = &self.prices;
        let prices = PriceSchedule {
            coal: r.coal_per_kg.resolve(stages, "prices.coal_per_kg")?.into_iter().map(|v| v * 1000.0).collect(),
            hydrogen_purchase: r.hydrogen_purchase_per_nm3.resolve(stages, "prices.hydrogen_purchase_per_nm3")?,
            hydrogen_sell: r.hydrogen_sell_per_nm3.resolve(stages, "prices.hydrogen_sell_per_nm3")?,
            ammonia_purchase: r.ammonia_purchase_per_t.resolve(stages, "prices.ammonia_purchase_per_t")?,
            ammonia_sell: r.ammonia_sell_per_t.resolve(stages, "prices.ammonia_sell_per_t")?,
            retirement: r
                .cfpp_retirement_per_kw
                .resolve(stages, "prices.cfpp_retirement_per_kw")?
                .into_iter()
                .map(|v| v * 1000.0)
                .collect(),
        };

        let mut options = ModelOptions {
            as_transient: self.options.as_transient,
            discount_degradation: self.options.discount_degradation,
            trading_enabled: self.options.trading_enabled,
            ..ModelOptions::default()
        };
        if self.options.paper_literal {
            options.set_paper_literal();
        }

        let inputs = ModelInputs {
            currency: self.currency.clone(),
            planning,
            facilities,
            conversion,
            prices,
            options,
            series,
        };
        report.extend(validate_inputs(&inputs));
        if report.has_fatal() {
            return Err(ConfigError::Validation(report));
        }
        Ok((inputs, report))
    }

    /// Series path resolved against the directory of `config_path`.
    pub fn series_path(&self, config_path: &Path) -> Option<PathBuf> {
        self.series.as_ref().map(|p| {
            if p.is_absolute() {
                p.clone()
            } else {
                config_path.parent().unwrap_or(Path::new(".")).join(p)
            }
        })
    }
}

pub fn load_config(path: &Path) -> Result<RawConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
    RawConfig::from_toml_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_stage_values_hit_both_endpoints() {
        let v = StageValue::Linear { start: 2.0, end: 1.5 }.resolve(3, "x").unwrap();
        assert_eq!(v, vec![2.0, 1.75, 1.5]);
        assert_eq!(StageValue::Linear { start: 2.0, end: 1.5 }.resolve(1, "x").unwrap(), vec![2.0]);
        assert!(StageValue::List(vec![1.0]).resolve(2, "x").is_err());
    }

    #[test]
    fn unit_factors() {
        assert_eq!(unit_factor(CapacityKind::Power, "GW"), Some(1e3));
        assert_eq!(unit_factor(CapacityKind::HydrogenVolume, "MNm³"), Some(1e6));
        assert_eq!(unit_factor(CapacityKind::Energy, "GW"), None);
    }
}
