//! Report files: plan, dispatch trajectories, metrics, convergence, sweep.

use std::io::Write;
use std::path::Path;

use crate::domain::{OpVar, PlanSolution};
use crate::metrics::MetricsReport;

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

/// One row per timestep, one column per operational series. Inventories
/// are reported at the start of each step; synthesis setpoints are expanded
/// to the steps of their interval.
pub fn dispatch_csv(plan: &PlanSolution, stage: u32) -> String {
    let st = plan.stage(stage);
    let d = &st.dispatch;
    let n = d.get(OpVar::PWind).len();
    let per_interval = if d.setpoints.is_empty() { 0 } else { n / d.setpoints.len() };
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t"];
    header.extend(OpVar::ALL.iter().map(|v| v.name()));
    if per_interval > 0 {
        header.push("q_h_setpoint_nm3h");
    }
    w.write_record(&header).expect("in-memory csv");
    let mut row = Vec::with_capacity(header.len());
    for t in 0..n {
        row.clear();
        row.push(t.to_string());
        row.extend(OpVar::ALL.iter().map(|v| (d.get(*v)[t] + 0.0).to_string()));
        if per_interval > 0 {
            row.push((d.setpoints[t / per_interval] + 0.0).to_string());
        }
        w.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
}

/// One sweep point; `metrics` is `None` for a failed solve.
pub struct SweepRow {
    pub target: f64,
    pub status: String,
    pub metrics: Option<MetricsReport>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = Vec::new();
    writeln!(out, "target,status,lcoe,lcoe_g,lcos_b,lcos_h,lcos_a,lcoh,r_curt,r_reti").unwrap();
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
    for r in rows {
        match &r.metrics {
            Some(m) => {
                let p = &m.prices_per_kwh;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.target,
                    r.status,
                    p.lcoe,
                    p.lcoe_g,
                    opt(p.lcos_b),
                    opt(p.lcos_h),
                    opt(p.lcos_a),
                    opt(p.lcoh),
                    opt(m.r_curt),
                    opt(m.r_reti)
                )
                .unwrap();
            }
            None => writeln!(out, "{},{},NA,NA,NA,NA,NA,NA,NA,NA", r.target, r.status).unwrap(),
        }
    }
    String::from_utf8(out).expect("utf8 csv")
}
