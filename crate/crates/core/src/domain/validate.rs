//! Admissibility checks on resolved inputs.

use std::fmt;

use serde::Serialize;

use super::{Facility, ModelInputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Fatal,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

impl Issue {
    pub fn fatal(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Fatal,
            code,
            message: message.into(),
        }
    }

    pub fn warning(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            code,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn push(&mut self, issue: Issue) {
        self.issues.push(issue);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.issues.extend(other.issues);
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has_fatal(&self) -> bool {
        self.issues.iter().any(|i| i.severity == Severity::Fatal)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    pub fn contains_code(&self, code: &str) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.issues {
            let sev = match i.severity {
                Severity::Fatal => "fatal",
                Severity::Warning => "warning",
            };
            writeln!(f, "  [{sev}] {}: {}", i.code, i.message)?;
        }
        Ok(())
    }
}

pub fn validate_inputs(inputs: &ModelInputs) -> ValidationReport {
    let mut r = ValidationReport::default();
    let p = &inputs.planning;
    let stages = p.stages as usize;

    if p.stages < 1 {
        r.push(Issue::fatal("stages", "stage count must be at least 1"));
    }
    if p.years_per_stage < 1 {
        r.push(Issue::fatal("years_per_stage", "years per stage must be at least 1"));
    }
    if p.timesteps < 1 {
        r.push(Issue::fatal("timesteps", "timestep count must be at least 1"));
    }
    if !(p.timestep_hours > 0.0 && p.timestep_hours.is_finite()) {
        r.push(Issue::fatal("timestep_hours", "timestep length must be positive"));
    }
    if !(p.interest_rate > -1.0 && p.interest_rate.is_finite()) {
        r.push(Issue::fatal("interest_rate", "interest rate must exceed -1"));
    }
    if !(p.epsilon > 0.0) {
        r.push(Issue::fatal("epsilon", "gap tolerance must be positive"));
    }
    if p.max_iterations < 1 {
        r.push(Issue::fatal("max_iterations", "iteration limit must be at least 1"));
    }
    if p.cer_targets.len() != stages {
        r.push(Issue::fatal("cer_length", format!("{} carbon targets for {stages} stages", p.cer_targets.len())));
    }
    if p.cer_targets.iter().any(|v| !(0.0..=1.0).contains(v)) {
        r.push(Issue::fatal("cer_range", "carbon reduction targets must lie in [0,1]"));
    }
    if p.cer_targets.windows(2).any(|w| w[1] < w[0]) {
        r.push(Issue::warning("cer_monotone", "non-monotone carbon targets"));
    }

    for f in Facility::ALL {
        let fp = inputs.facility(f);
        let k = f.key();
        if fp.invest_cost.len() != stages || fp.capacity_max.len() != stages {
            r.push(Issue::fatal("stage_length", format!("{k}: per-stage vectors must have {stages} entries")));
        }
        if fp.invest_cost.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            r.push(Issue::fatal("invest_cost", format!("{k}: investment cost must be finite and nonnegative")));
        }
        if fp.capacity_max.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            r.push(Issue::fatal("capacity_max", format!("{k}: capacity limit must be finite and nonnegative")));
        }
        if !(fp.om_fraction >= 0.0 && fp.om_fraction.is_finite()) {
            r.push(Issue::fatal("om_fraction", format!("{k}: O&M fraction must be nonnegative")));
        }
        if fp.lifetime_years < 1 {
            r.push(Issue::fatal("lifetime", format!("{k}: lifetime must be at least one year")));
        }
        if !(0.0 <= fp.band_lower && fp.band_lower <= fp.band_upper && fp.band_upper <= 1.0) {
            r.push(Issue::fatal("band", format!("{k}: operating band must satisfy 0 <= lower <= upper <= 1")));
        }
        if !(fp.initial_capacity >= 0.0 && fp.initial_capacity.is_finite()) {
            r.push(Issue::fatal("initial_capacity", format!("{k}: initial capacity must be nonnegative")));
        }
    }

    let c = &inputs.conversion;
    for (name, v) in [
        ("kappa_ae", c.kappa_ae),
        ("kappa_fc", c.kappa_fc),
        ("kappa_as", c.kappa_as),
        ("gamma_h2a", c.gamma_h2a),
        ("gamma_a2p", c.gamma_a2p),
        ("gamma_p2c", c.gamma_p2c),
        ("mu_cf", c.mu_cf),
        ("battery_hours", c.battery_hours),
        ("as_full_load_hours", c.synthesis_full_load_hours),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            r.push(Issue::fatal("conversion", format!("{name} must be positive")));
        }
    }
    if !(0.0..1.0).contains(&c.battery_self_discharge) {
        r.push(Issue::fatal("battery_self_discharge", "self-discharge must lie in [0,1)"));
    }
    if !(c.battery_efficiency > 0.0 && c.battery_efficiency <= 1.0) {
        r.push(Issue::fatal("battery_efficiency", "battery efficiency must lie in (0,1]"));
    }
    if !(c.degradation_cost >= 0.0 && c.degradation_cost.is_finite()) {
        r.push(Issue::fatal("degradation_cost", "degradation cost must be nonnegative"));
    }
    if !(c.ramp_down <= 0.0 && c.ramp_up >= 0.0) {
        r.push(Issue::fatal("ramp", "ramp limits must satisfy down <= 0 <= up"));
    }
    if inputs.options.as_transient {
        if !(c.transient_time_h > 0.0) {
            r.push(Issue::fatal("transient_time", "synthesis transient time constant must be positive"));
        }
        let ratio = c.synthesis_interval_h / p.timestep_hours;
        let k = ratio.round();
        if !(k >= 1.0 && (ratio - k).abs() <= 1e-9 * ratio.max(1.0)) {
            r.push(Issue::fatal(
                "synthesis_interval",
                "synthesis setpoint interval must be a positive multiple of the timestep",
            ));
        } else if p.timesteps % (k as usize) != 0 {
            r.push(Issue::fatal(
                "synthesis_interval",
                "timestep count must be a multiple of the synthesis setpoint interval",
            ));
        }
    }

    let pr = &inputs.prices;
    for (name, v) in [
        ("coal", &pr.coal),
        ("hydrogen_purchase", &pr.hydrogen_purchase),
        ("hydrogen_sell", &pr.hydrogen_sell),
        ("ammonia_purchase", &pr.ammonia_purchase),
        ("ammonia_sell", &pr.ammonia_sell),
        ("retirement", &pr.retirement),
    ] {
        if v.len() != stages {
            r.push(Issue::fatal("stage_length", format!("price {name}: expected {stages} entries")));
        }
        if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            r.push(Issue::fatal("price", format!("price {name} must be finite and nonnegative")));
        }
    }
    if pr.hydrogen_sell.iter().zip(&pr.hydrogen_purchase).any(|(s, b)| s > b) {
        r.push(Issue::warning("hydrogen_price", "hydrogen sell price exceeds purchase price"));
    }
    if pr.ammonia_sell.iter().zip(&pr.ammonia_purchase).any(|(s, b)| s > b) {
        r.push(Issue::warning("ammonia_price", "ammonia sell price exceeds purchase price"));
    }

    let s = &inputs.series;
    let n = p.timesteps;
    for (name, v) in [("wind_pu", &s.wind_pu), ("solar_pu", &s.solar_pu), ("uhvdc_mw", &s.uhvdc_mw)] {
        if v.len() != n {
            r.push(Issue::fatal("series_length", format!("{name} has {} entries, expected {n}", v.len())));
        }
        if v.iter().any(|x| !x.is_finite()) {
            r.push(Issue::fatal("series_finite", format!("{name} contains non-finite values")));
        }
    }
    for (name, v) in [("wind_pu", &s.wind_pu), ("solar_pu", &s.solar_pu)] {
        if v.iter().any(|x| !(0.0..=1.0).contains(x)) {
            r.push(Issue::fatal("per_unit_range", format!("{name}: per-unit out of [0,1]")));
        }
    }
    if s.uhvdc_mw.iter().any(|x| *x < 0.0) {
        r.push(Issue::fatal("load_negative", "uhvdc_mw must be nonnegative"));
    }
    r
}
