//! Seeded synthetic wind, solar and UHVDC profiles with a matching config.
//!
//! Wind is a winter-peaking seasonal sinusoid plus a diurnal ripple and
//! AR(1) noise; solar is a clear-sky arch scaled by season and random cloud
//! cover. Each profile is rescaled (then clipped to [0,1]) so its mean times
//! 8760 h hits the full-load-hour target.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::config::{RawConfig, RawConversion, RawFacility, RawOptions, RawPlanning, RawPrices, StageValue};
use crate::domain::TimeSeriesBundle;

pub const WIND_FLH: f64 = 3000.0;
pub const SOLAR_FLH: f64 = 1500.0;
pub const UHVDC_RATING_MW: f64 = 8000.0;
const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Small,
    Medium,
}

impl Profile {
    pub fn timesteps(self) -> usize {
        match self {
            Profile::Small => 168,
            Profile::Medium => 8760,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::Small => "small",
            Profile::Medium => "medium",
        }
    }

    pub fn parse(s: &str) -> Option<Profile> {
        match s {
            "small" => Some(Profile::Small),
            "medium" => Some(Profile::Medium),
            _ => None,
        }
    }
}

/// Shape of a synthetic instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub stages: u32,
    pub years_per_stage: u32,
    pub timesteps: usize,
    /// Carbon reduction reached in the final stage.
    pub final_cer: f64,
}

impl SyntheticSpec {
    pub fn from_profile(profile: Profile) -> Self {
        Self {
            stages: 3,
            years_per_stage: 5,
            timesteps: profile.timesteps(),
            final_cer: 0.5,
        }
    }
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Smallest scale within tolerance such that `mean(clip(scale·raw, 0, 1))·8760 = flh`.
fn calibrate(raw: &[f64], flh: f64) -> Vec<f64> {
    let target = flh / HOURS_PER_YEAR;
    let mean_at = |s: f64| raw.iter().map(|r| (s * r).clamp(0.0, 1.0)).sum::<f64>() / raw.len() as f64;
    let (mut lo, mut hi) = (0.0, 1.0);
    while mean_at(hi) < target && hi < 1e6 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    raw.iter().map(|r| round6((hi * r).clamp(0.0, 1.0))).collect()
}

pub fn generate_series(seed: u64, timesteps: usize) -> TimeSeriesBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wind_raw = Vec::with_capacity(timesteps);
    let mut solar_raw = Vec::with_capacity(timesteps);
    let mut load = Vec::with_capacity(timesteps);
    let mut ar = 0.0f64;
    let mut cloud = 0.0f64;
    for t in 0..timesteps {
        let h = t as f64;
        let season = (2.0 * PI * h / HOURS_PER_YEAR).cos();
        let hour_of_day = (t % 24) as f64;
        let diurnal = (2.0 * PI * (hour_of_day - 3.0) / 24.0).cos();

        ar = 0.9 * ar + 0.12 * (rng.random::<f64>() - 0.5);
        wind_raw.push((0.45 + 0.15 * season + 0.08 * diurnal + ar).max(0.0));

        if t % 24 == 0 {
            cloud = 0.6 * rng.random::<f64>();
        }
        let arch = (PI * (hour_of_day - 6.0) / 12.0).sin().max(0.0);
        let summer = 0.8 - 0.2 * season;
        solar_raw.push(arch * summer * (1.0 - cloud));

        let evening = (2.0 * PI * (hour_of_day - 19.0) / 24.0).cos();
        let shape = 0.78 + 0.08 * season + 0.12 * evening + 0.03 * (rng.random::<f64>() - 0.5);
        load.push(((UHVDC_RATING_MW * shape.clamp(0.3, 1.0)) * 1e3).round() / 1e3);
    }
    TimeSeriesBundle {
        wind_pu: calibrate(&wind_raw, WIND_FLH),
        solar_pu: calibrate(&solar_raw, SOLAR_FLH),
        uhvdc_mw: load,
    }
}

fn facility(
    invest: f64,
    basis: &str,
    om: f64,
    lifetime: u32,
    unit: &str,
    cap: f64,
    band: [f64; 2],
) -> RawFacility {
    RawFacility {
        invest_cost: StageValue::Scalar(invest),
        cost_basis: basis.into(),
        om_fraction: om,
        lifetime_years: lifetime,
        capacity_unit: unit.into(),
        capacity_max: StageValue::Scalar(cap),
        initial_capacity: 0.0,
        band,
    }
}

/// Config matching [`generate_series`]; `series` names the CSV written next to it.
///
/// Investment and retirement costs are scaled by the represented fraction of
/// a year (`N·ΔT/8760`), so a one-week window trades off capital against a
/// week's worth of operation rather than a full year's.
pub fn synthetic_config(spec: SyntheticSpec, series: Option<&str>) -> RawConfig {
    let window = (spec.timesteps as f64 / HOURS_PER_YEAR).min(1.0);
    let facility = |invest: f64, basis: &str, om: f64, lifetime: u32, unit: &str, cap: f64, band: [f64; 2]| {
        facility(invest * window, basis, om, lifetime, unit, cap, band)
    };
    let mut facilities = std::collections::BTreeMap::new();
    facilities.insert("wind".into(), facility(6000.0, "kW", 0.02, 20, "GW", 24.2, [0.0, 1.0]));
    facilities.insert("solar".into(), facility(3800.0, "kW", 0.015, 25, "GW", 32.03, [0.0, 1.0]));
    facilities.insert("cfpp".into(), facility(3500.0, "kW", 0.03, 25, "GW", 8.0, [0.3, 1.0]));
    facilities.insert("battery".into(), facility(1500.0, "kWh", 0.02, 10, "GWh", 45000.0, [0.1, 0.9]));
    facilities.insert("electrolyzer".into(), facility(2000.0, "kW", 0.02, 20, "GW", 8.0, [0.0, 1.0]));
    facilities.insert("hydrogen_storage".into(), facility(250.0, "Nm3", 0.01, 25, "MNm3", 50.0, [0.05, 0.95]));
    facilities.insert("fuel_cell".into(), facility(3000.0, "kW", 0.02, 15, "GW", 8.0, [0.0, 1.0]));
    facilities.insert("ammonia_synthesis".into(), facility(4000.0, "t/yr", 0.02, 25, "Mt/yr", 10.0, [0.2, 1.0]));
    facilities.insert("ammonia_storage".into(), facility(5500.0, "t", 0.01, 20, "Mt", 10.0, [0.1, 0.9]));
    RawConfig {
        currency: "RMB".into(),
        series: series.map(Into::into),
        planning: RawPlanning {
            stages: spec.stages,
            years_per_stage: spec.years_per_stage,
            timesteps: spec.timesteps,
            timestep_hours: 1.0,
            interest_rate: 0.08,
            cer_targets: StageValue::Linear {
                start: 0.0,
                end: spec.final_cer,
            },
            epsilon: 1e-4,
            max_iterations: 500,
        },
        options: RawOptions::default(),
        conversion: RawConversion {
            kappa_ae_kwh_per_nm3: 4.5,
            kappa_fc_kwh_per_nm3: 1.6,
            kappa_as_kwh_per_nm3: 0.5,
            gamma_h2a_t_per_nm3: 1.0 / 1960.0,
            gamma_a2p_kwh_per_t: 2000.0,
            gamma_p2c_kg_per_kwh: 0.300,
            mu_cf_kg_per_kwh: 0.738,
            battery_self_discharge_per_step: 0.0001,
            battery_efficiency: 0.95,
            battery_hours: 4.0,
            battery_degradation_cost_per_kwh: 0.05,
            as_ramp_down_per_step: -0.2,
            as_ramp_up_per_step: 0.2,
            as_transient_time_h: 2.0,
            as_interval_h: 4.0,
            as_full_load_hours: 8000.0,
        },
        prices: RawPrices {
            coal_per_kg: StageValue::Scalar(0.9),
            hydrogen_purchase_per_nm3: StageValue::Linear { start: 2.0, end: 1.5 },
            hydrogen_sell_per_nm3: StageValue::Scalar(1.2),
            ammonia_purchase_per_t: StageValue::Linear {
                start: 4000.0,
                end: 3500.0,
            },
            ammonia_sell_per_t: StageValue::Scalar(3000.0),
            cfpp_retirement_per_kw: StageValue::Scalar(500.0 * window),
        },
        facilities,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_a_seed() {
        assert_eq!(generate_series(3, 48), generate_series(3, 48));
        assert_ne!(generate_series(3, 48), generate_series(4, 48));
    }
}
