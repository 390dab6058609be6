//! Present-value factors and salvage fractions.

/// `(1+r)^-y`
pub fn delta1(year: u32, rate: f64) -> f64 {
    (1.0 + rate).powi(-(year as i32))
}

/// Sum of `delta1` over years `(s-1)·years_per_stage + 1 ..= stages·years_per_stage`:
/// the remaining horizon seen from the start of stage `s`.
pub fn delta2(stage: u32, stages: u32, years_per_stage: u32, rate: f64) -> f64 {
    assert!(stage >= 1 && stage <= stages, "stage {stage} outside 1..={stages}");
    ((stage - 1) * years_per_stage + 1..=stages * years_per_stage)
        .map(|y| delta1(y, rate))
        .sum()
}

/// Sum of `delta1` over the years of stage `s` alone.
pub fn delta3(stage: u32, years_per_stage: u32, rate: f64) -> f64 {
    assert!(stage >= 1, "stages are numbered from 1");
    ((stage - 1) * years_per_stage + 1..=stage * years_per_stage)
        .map(|y| delta1(y, rate))
        .sum()
}

/// Fraction of an investment made in stage `s` still recoverable at the end
/// of the horizon. Single-year assets are fully consumed.
pub fn salvage_fraction(stage: u32, lifetime_years: u32, stages: u32, years_per_stage: u32) -> f64 {
    assert!(stage >= 1 && stage <= stages, "stage {stage} outside 1..={stages}");
    if lifetime_years <= 1 {
        return 0.0;
    }
    let used = ((stages - stage + 1) * years_per_stage) as f64 - 1.0;
    (1.0 - used / (lifetime_years as f64 - 1.0)).max(0.0)
}

/// Baseline emissions: half the stage-one delivered energy at the coal
/// emission intensity (t/MWh · MWh = t).
pub fn baseline_emissions(uhvdc_mw: &[f64], timestep_hours: f64, emission_t_per_mwh: f64) -> f64 {
    0.5 * emission_t_per_mwh * uhvdc_mw.iter().sum::<f64>() * timestep_hours
}
