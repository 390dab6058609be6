//! Primal vectors back to plan records, cost terms and residual checks.

use crate::domain::{CostBreakdown, Diagnostics, Facility, ModelInputs, OpVar, PlanSolution, StageDispatch, StagePlan};

use super::BlockAngularLp;

/// Present-value cost terms evaluated from the primal values.
pub fn cost_breakdown(model: &BlockAngularLp, inputs: &ModelInputs, xs: &[&[f64]]) -> CostBreakdown {
    let p = &inputs.planning;
    let dt = p.timestep_hours;
    let conv = &inputs.conversion;
    let pr = &inputs.prices;
    let mut out = CostBreakdown::default();
    let d_end = p.delta1(p.horizon_years());
    for (b, x) in model.blocks.iter().zip(xs) {
        let s = b.stage;
        let si = (s - 1) as usize;
        let idx = &b.index;
        let d_first = p.delta1(p.first_year(s));
        let d_stage = p.delta3(s);
        let d_remaining = p.delta2(s);
        let mut inv = vec![0.0; Facility::COUNT];
        let mut om = vec![0.0; Facility::COUNT];
        let mut sav = vec![0.0; Facility::COUNT];
        for f in Facility::ALL {
            let fp = inputs.facility(f);
            let base = fp.invest_cost[si] * x[idx.added(f)];
            inv[f.index()] = d_first * base;
            om[f.index()] = d_remaining * fp.om_fraction * base;
            sav[f.index()] = d_end * p.salvage(s, fp.lifetime_years) * base;
        }
        out.investment.push(inv);
        out.om.push(om);
        out.salvage.push(sav);
        out.retirement.push(d_first * pr.retirement[si] * x[idx.retired()]);
        let total = |v: OpVar| idx.op_range(v).map(|c| x[c]).sum::<f64>() * dt;
        out.coal.push(d_stage * pr.coal[si] * conv.gamma_p2c * total(OpVar::PCf));
        let deg_factor = if inputs.options.discount_degradation { d_stage } else { 1.0 };
        out.degradation.push(deg_factor * conv.degradation_cost * total(OpVar::PBdisc));
        out.hydrogen_purchase.push(d_stage * pr.hydrogen_purchase[si] * total(OpVar::QHPurch));
        out.ammonia_purchase.push(d_stage * pr.ammonia_purchase[si] * total(OpVar::QAPurch));
        out.hydrogen_revenue.push(d_stage * pr.hydrogen_sell[si] * total(OpVar::QHSell));
        out.ammonia_revenue.push(d_stage * pr.ammonia_sell[si] * total(OpVar::QASell));
    }
    out
}

pub fn extract_plan(
    model: &BlockAngularLp,
    inputs: &ModelInputs,
    xs: &[&[f64]],
    objective: f64,
    diagnostics: Diagnostics,
) -> PlanSolution {
    let stages = model
        .blocks
        .iter()
        .zip(xs)
        .map(|(b, x)| {
            let idx = &b.index;
            StagePlan {
                stage: b.stage,
                capacity: Facility::ALL.iter().map(|&f| x[idx.capacity(f)]).collect(),
                added: Facility::ALL.iter().map(|&f| x[idx.added(f)]).collect(),
                retired_cfpp: x[idx.retired()],
                dispatch: StageDispatch {
                    series: OpVar::ALL.iter().map(|&v| x[idx.op_range(v)].to_vec()).collect(),
                    setpoints: x[idx.setpoint_range()].to_vec(),
                },
            }
        })
        .collect();
    PlanSolution {
        currency: inputs.currency.clone(),
        facility_order: Facility::ALL.iter().map(|f| f.label()).collect(),
        objective,
        stages,
        costs: cost_breakdown(model, inputs, xs),
        diagnostics,
    }
}

/// Worst relative violation within one constraint family. For row `r`
/// the violation `|a_r·x − b_r|` (plus any bound violation of the row's
/// slack) is scaled by `1 + max(|b_r|, max_j |a_rj x_j|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyResidual {
    pub stage: Option<u32>,
    pub family: String,
    pub relative: f64,
    pub absolute: f64,
}

pub fn family_residuals(model: &BlockAngularLp, xs: &[&[f64]]) -> Vec<FamilyResidual> {
    let mut out = Vec::new();
    for (b, x) in model.blocks.iter().zip(xs) {
        let a = &b.problem.a;
        let m = a.nrows();
        let mut ax = vec![0.0; m];
        let mut scale = vec![0.0f64; m];
        for j in 0..a.ncols() {
            let (rows, vals) = a.col(j);
            for (&r, &v) in rows.iter().zip(vals) {
                let term = v * x[j];
                ax[r] += term;
                scale[r] = scale[r].max(term.abs());
            }
        }
        let mut viol: Vec<f64> = (0..m).map(|r| (ax[r] - b.problem.rhs[r]).abs()).collect();
        for j in b.index.slack_range() {
            let (rows, _) = a.col(j);
            let bound = (b.problem.lower[j] - x[j]).max(x[j] - b.problem.upper[j]).max(0.0);
            viol[rows[0]] = viol[rows[0]].max(bound);
        }
        for fam in &b.families {
            let mut rel = 0.0f64;
            let mut abs = 0.0f64;
            for r in fam.rows.clone() {
                abs = abs.max(viol[r]);
                rel = rel.max(viol[r] / (1.0 + scale[r].max(b.problem.rhs[r].abs())));
            }
            out.push(FamilyResidual {
                stage: Some(b.stage),
                family: fam.name.to_string(),
                relative: rel,
                absolute: abs,
            });
        }
        let structural = b.index.structural_dim();
        let mut abs = 0.0f64;
        let mut rel = 0.0f64;
        for j in 0..structural {
            let v = (b.problem.lower[j] - x[j]).max(x[j] - b.problem.upper[j]).max(0.0);
            abs = abs.max(v);
            rel = rel.max(v / (1.0 + x[j].abs()));
        }
        out.push(FamilyResidual {
            stage: Some(b.stage),
            family: "variable_bounds".into(),
            relative: rel,
            absolute: abs,
        });
    }
    let link = &model.linking;
    if link.num_rows() > 0 {
        let mut ax = vec![0.0; link.num_rows()];
        let mut scale = vec![0.0f64; link.num_rows()];
        for (bmat, x) in link.blocks.iter().zip(xs) {
            for (r, c, v) in bmat.triplets() {
                ax[r] += v * x[c];
                scale[r] = scale[r].max((v * x[c]).abs());
            }
        }
        let mut rel = 0.0f64;
        let mut abs = 0.0f64;
        for r in 0..ax.len() {
            let v = (ax[r] - link.rhs[r]).abs();
            abs = abs.max(v);
            rel = rel.max(v / (1.0 + scale[r].max(link.rhs[r].abs())));
        }
        out.push(FamilyResidual {
            stage: None,
            family: "capacity_link".into(),
            relative: rel,
            absolute: abs,
        });
    }
    out
}
