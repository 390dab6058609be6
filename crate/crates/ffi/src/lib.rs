//! C ABI over the planning engine.
//!
//! Inputs and solved plans are opaque handles owned by the caller and
//! released with their `_free` function. Every fallible call returns an
//! `MsepStatus`; on failure `msep_last_error` describes the cause for the
//! calling thread. Strings returned by the library are freed with
//! `msep_string_free`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::ptr;

use msep::cli::synthetic::{generate_series, synthetic_config, SyntheticSpec};
use msep::domain::{load_config, load_series, Facility, ModelInputs};
use msep::lp::LpStatus;
use msep::metrics::metrics_report;
use msep::solve::{solve_plan, Mode, SolveError, SolveOptions, SolveReport};

/// Result of every fallible call. Values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsepStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Unreadable or invalid config, series or argument.
    Input = 2,
    Infeasible = 3,
    /// Column generation stopped at its round limit; the plan is still returned.
    IterLimit = 4,
    Numerical = 5,
    /// Internal fault caught at the boundary.
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsepMode {
    Direct = 0,
    Dwdcg = 1,
}

/// Facility index accepted by `msep_plan_capacity`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsepFacility {
    Wind = 0,
    Solar = 1,
    Cfpp = 2,
    Battery = 3,
    Electrolyzer = 4,
    HydrogenStorage = 5,
    FuelCell = 6,
    AmmoniaSynthesis = 7,
    AmmoniaStorage = 8,
}

/// Resolved, validated model inputs.
pub struct MsepInputs {
    inner: ModelInputs,
}

/// A solved plan with its convergence log.
pub struct MsepPlan {
    inputs: ModelInputs,
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: MsepStatus, msg: impl Into<String>) -> MsepStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into `Internal`.
fn guard(f: impl FnOnce() -> MsepStatus) -> MsepStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == MsepStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(MsepStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, MsepStatus> {
    if p.is_null() {
        return Err(fail(MsepStatus::NullArgument, format!("{what} is null")));
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => Err(fail(MsepStatus::Input, format!("{what} is not valid UTF-8"))),
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

fn resolve(raw: msep::domain::RawConfig, series: msep::domain::TimeSeriesBundle) -> Result<ModelInputs, MsepStatus> {
    raw.resolve(series)
        .map(|(inputs, _)| inputs)
        .map_err(|e| fail(MsepStatus::Input, e.to_string()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn msep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn msep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a TOML config and its series. `series_path` may be null, in which
/// case the config's `series` entry is read relative to the config file.
///
/// # Safety
/// Path arguments must be null or NUL-terminated strings; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msep_inputs_load(
    config_path: *const c_char,
    series_path: *const c_char,
    out: *mut *mut MsepInputs,
) -> MsepStatus {
    guard(|| {
        if out.is_null() {
            return fail(MsepStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let cfg = match path_arg(config_path, "config_path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let raw = match load_config(&cfg) {
            Ok(r) => r,
            Err(e) => return fail(MsepStatus::Input, e.to_string()),
        };
        let series_file = if series_path.is_null() {
            match &raw.series {
                Some(rel) => cfg.parent().unwrap_or(Path::new(".")).join(rel),
                None => return fail(MsepStatus::Input, "config names no series and series_path is null"),
            }
        } else {
            match path_arg(series_path, "series_path") {
                Ok(p) => p,
                Err(s) => return s,
            }
        };
        let series = match load_series(&series_file) {
            Ok(s) => s,
            Err(e) => return fail(MsepStatus::Input, e.to_string()),
        };
        match resolve(raw, series) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(MsepInputs { inner }));
                MsepStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Builds seeded synthetic inputs with `stages` stages of five years and
/// `timesteps` hourly steps (a multiple of four).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msep_inputs_synthetic(
    seed: u64,
    stages: u32,
    timesteps: usize,
    out: *mut *mut MsepInputs,
) -> MsepStatus {
    guard(|| {
        if out.is_null() {
            return fail(MsepStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        if stages == 0 || timesteps == 0 {
            return fail(MsepStatus::Input, "stages and timesteps must be positive");
        }
        let spec = SyntheticSpec {
            stages,
            years_per_stage: 5,
            timesteps,
            final_cer: 0.5,
        };
        match resolve(synthetic_config(spec, None), generate_series(seed, timesteps)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(MsepInputs { inner }));
                MsepStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Replaces the carbon targets with a linear ramp from zero to `target` in
/// the final stage.
///
/// # Safety
/// `inputs` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn msep_inputs_set_final_cer(inputs: *mut MsepInputs, target: f64) -> MsepStatus {
    guard(|| {
        let Some(inputs) = inputs.as_mut() else {
            return fail(MsepStatus::NullArgument, "inputs is null");
        };
        if !(0.0..=1.0).contains(&target) {
            return fail(MsepStatus::Input, format!("target {target} outside [0,1]"));
        }
        inputs.inner.set_linear_cer(target);
        MsepStatus::Ok
    })
}

/// # Safety
/// `inputs` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn msep_inputs_free(inputs: *mut MsepInputs) {
    if !inputs.is_null() {
        drop(Box::from_raw(inputs));
    }
}

/// Solves the plan. `epsilon <= 0` and `max_iterations == 0` keep the
/// config's values; `threads == 0` uses one pricing thread per core. On
/// `IterLimit` the best plan found is still stored in `out`.
///
/// # Safety
/// `inputs` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msep_solve(
    inputs: *const MsepInputs,
    mode: MsepMode,
    epsilon: f64,
    max_iterations: usize,
    threads: usize,
    out: *mut *mut MsepPlan,
) -> MsepStatus {
    guard(|| {
        if out.is_null() {
            return fail(MsepStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let Some(inputs) = inputs.as_ref() else {
            return fail(MsepStatus::NullArgument, "inputs is null");
        };
        let mode = match mode {
            MsepMode::Direct => Mode::Direct,
            MsepMode::Dwdcg => Mode::Dwdcg,
        };
        let mut opts = SolveOptions::from_inputs(mode, &inputs.inner);
        if epsilon > 0.0 {
            opts.epsilon = epsilon;
        }
        if max_iterations > 0 {
            opts.max_iterations = max_iterations;
        }
        opts.threads = threads;
        match solve_plan(&inputs.inner, &opts) {
            Ok(report) => {
                let status = if report.plan.diagnostics.status == LpStatus::IterLimit {
                    set_error("iteration limit reached before the gap closed");
                    MsepStatus::IterLimit
                } else {
                    MsepStatus::Ok
                };
                *out = Box::into_raw(Box::new(MsepPlan {
                    inputs: inputs.inner.clone(),
                    report,
                }));
                status
            }
            Err(SolveError::Infeasible(m)) => fail(MsepStatus::Infeasible, format!("infeasible: {m}")),
            Err(e @ SolveError::IterLimit) => fail(MsepStatus::IterLimit, e.to_string()),
            Err(SolveError::Numerical(m)) => fail(MsepStatus::Numerical, format!("numerical failure: {m}")),
        }
    })
}

/// # Safety
/// `plan` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn msep_plan_free(plan: *mut MsepPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Net present cost of the plan.
///
/// # Safety
/// `plan` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msep_plan_objective(plan: *const MsepPlan, out: *mut f64) -> MsepStatus {
    guard(|| match (plan.as_ref(), out.is_null()) {
        (Some(p), false) => {
            *out = p.report.plan.objective;
            MsepStatus::Ok
        }
        _ => fail(MsepStatus::NullArgument, "plan or out is null"),
    })
}

/// Simplex pivots (direct) or column generation rounds (decomposed).
///
/// # Safety
/// `plan` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msep_plan_iterations(plan: *const MsepPlan, out: *mut usize) -> MsepStatus {
    guard(|| match (plan.as_ref(), out.is_null()) {
        (Some(p), false) => {
            *out = p.report.plan.diagnostics.iterations;
            MsepStatus::Ok
        }
        _ => fail(MsepStatus::NullArgument, "plan or out is null"),
    })
}

/// Number of planning stages.
///
/// # Safety
/// `plan` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msep_plan_stage_count(plan: *const MsepPlan, out: *mut u32) -> MsepStatus {
    guard(|| match (plan.as_ref(), out.is_null()) {
        (Some(p), false) => {
            *out = p.report.plan.stages.len() as u32;
            MsepStatus::Ok
        }
        _ => fail(MsepStatus::NullArgument, "plan or out is null"),
    })
}

/// Installed capacity of `facility` in 1-based `stage`, in the facility's
/// native unit (MW, MWh, Nm3, t or t/yr).
///
/// # Safety
/// `plan` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msep_plan_capacity(
    plan: *const MsepPlan,
    stage: u32,
    facility: MsepFacility,
    out: *mut f64,
) -> MsepStatus {
    guard(|| {
        let (Some(p), false) = (plan.as_ref(), out.is_null()) else {
            return fail(MsepStatus::NullArgument, "plan or out is null");
        };
        let stages = &p.report.plan.stages;
        let Some(st) = stages.iter().find(|s| s.stage == stage) else {
            return fail(MsepStatus::Input, format!("stage {stage} outside 1..={}", stages.len()));
        };
        *out = st.capacity[Facility::ALL[facility as usize].index()];
        MsepStatus::Ok
    })
}

/// Plan as pretty JSON (the `plan.json` document).
///
/// # Safety
/// `plan` must be a live handle and `out` a valid pointer. Free the string
/// with `msep_string_free`.
#[no_mangle]
pub unsafe extern "C" fn msep_plan_json(plan: *const MsepPlan, out: *mut *mut c_char) -> MsepStatus {
    guard(|| {
        let (Some(p), false) = (plan.as_ref(), out.is_null()) else {
            return fail(MsepStatus::NullArgument, "plan or out is null");
        };
        match serde_json::to_string_pretty(&p.report.plan) {
            Ok(s) => {
                *out = to_c_string(s);
                MsepStatus::Ok
            }
            Err(e) => fail(MsepStatus::Internal, e.to_string()),
        }
    })
}

/// Levelized costs, indices and ledger as pretty JSON (the `metrics.json`
/// document).
///
/// # Safety
/// `plan` must be a live handle and `out` a valid pointer. Free the string
/// with `msep_string_free`.
#[no_mangle]
pub unsafe extern "C" fn msep_plan_metrics_json(plan: *const MsepPlan, out: *mut *mut c_char) -> MsepStatus {
    guard(|| {
        let (Some(p), false) = (plan.as_ref(), out.is_null()) else {
            return fail(MsepStatus::NullArgument, "plan or out is null");
        };
        *out = ptr::null_mut();
        let report = match metrics_report(&p.report.plan, &p.inputs) {
            Ok(r) => r,
            Err(e) => return fail(MsepStatus::Numerical, e.to_string()),
        };
        match serde_json::to_string_pretty(&report) {
            Ok(s) => {
                *out = to_c_string(s);
                MsepStatus::Ok
            }
            Err(e) => fail(MsepStatus::Internal, e.to_string()),
        }
    })
}

/// Column generation log as CSV with wall times zeroed; null for a direct
/// solve.
///
/// # Safety
/// `plan` must be a live handle and `out` a valid pointer. Free the string
/// with `msep_string_free`.
#[no_mangle]
pub unsafe extern "C" fn msep_plan_convergence_csv(plan: *const MsepPlan, out: *mut *mut c_char) -> MsepStatus {
    guard(|| {
        let (Some(p), false) = (plan.as_ref(), out.is_null()) else {
            return fail(MsepStatus::NullArgument, "plan or out is null");
        };
        *out = p
            .report
            .convergence
            .as_ref()
            .map_or(ptr::null_mut(), |log| to_c_string(log.to_csv(true)));
        MsepStatus::Ok
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn msep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
