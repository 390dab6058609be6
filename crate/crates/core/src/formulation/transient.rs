//! Ammonia synthesis transient between quasi-steady setpoints.
//!
//! Within setpoint interval `k` the hourly hydrogen feed follows
//! `q[t] = q_k + (q_k − q_{k+1})·exp(−τ/T)`, which is linear in the setpoints
//! once the decay factor is evaluated. By default `τ` is measured from the
//! start of the interval; the absolute-time variant measures it from the
//! start of the year. The setpoint after the last interval wraps to the
//! first, matching the periodic inventories.

use crate::domain::ModelInputs;

/// Steps per setpoint interval, or `None` when the interval is not a
/// positive multiple of the timestep.
pub fn steps_per_interval(interval_h: f64, timestep_h: f64) -> Option<usize> {
    let ratio = interval_h / timestep_h;
    let k = ratio.round();
    (k >= 1.0 && (ratio - k).abs() <= 1e-9 * ratio.max(1.0)).then_some(k as usize)
}

pub fn setpoint_count(inputs: &ModelInputs) -> usize {
    if !inputs.options.as_transient {
        return 0;
    }
    let m = steps_per_interval(inputs.conversion.synthesis_interval_h, inputs.planning.timestep_hours)
        .expect("validated synthesis interval");
    inputs.planning.timesteps / m
}

/// One linear relation `q[t] = w_current·q_k + w_next·q_{k_next}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientTerm {
    pub t: usize,
    pub k: usize,
    pub k_next: usize,
    pub w_current: f64,
    pub w_next: f64,
}

pub fn decay(tau_h: f64, time_constant_h: f64) -> f64 {
    (-tau_h / time_constant_h).exp()
}

/// Feed value implied by two setpoints after `tau_h` hours.
pub fn transient_value(q_k: f64, q_next: f64, tau_h: f64, time_constant_h: f64) -> f64 {
    q_k + (q_k - q_next) * decay(tau_h, time_constant_h)
}

pub fn transient_terms(
    timesteps: usize,
    timestep_h: f64,
    steps_per_interval: usize,
    time_constant_h: f64,
    absolute_time: bool,
) -> Vec<TransientTerm> {
    let intervals = timesteps / steps_per_interval;
    (0..timesteps)
        .map(|t| {
            let k = t / steps_per_interval;
            let tau = if absolute_time {
                t as f64 * timestep_h
            } else {
                (t - k * steps_per_interval) as f64 * timestep_h
            };
            let e = decay(tau, time_constant_h);
            TransientTerm {
                t,
                k,
                k_next: (k + 1) % intervals,
                w_current: 1.0 + e,
                w_next: -e,
            }
        })
        .collect()
}
