//! Direct and decomposed solves of a planning model, returning plan records.

use std::time::Instant;

use thiserror::Error;

use crate::domain::{Diagnostics, ModelInputs, PlanSolution};
use crate::dwd::{run_dwd_cg, BlockAngularView, ConvergenceLog, DwdError, DwdOptions};
use crate::formulation::{
    assemble_monolithic, build_model, extract_plan, family_residuals, BlockAngularLp, FamilyResidual,
};
use crate::lp::{LpBackend, LpError, LpProblem, LpStatus, RevisedSimplex, SimplexOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Direct,
    Dwdcg,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Direct => "direct",
            Mode::Dwdcg => "dwdcg",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: Mode,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub threads: usize,
    pub simplex: SimplexOptions,
}

impl SolveOptions {
    pub fn from_inputs(mode: Mode, inputs: &ModelInputs) -> Self {
        Self {
            mode,
            epsilon: inputs.planning.epsilon,
            max_iterations: inputs.planning.max_iterations,
            threads: 0,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("iteration limit reached without a feasible plan")]
    IterLimit,
}

impl From<LpError> for SolveError {
    fn from(e: LpError) -> Self {
        SolveError::Numerical(e.to_string())
    }
}

impl From<DwdError> for SolveError {
    fn from(e: DwdError) -> Self {
        match e {
            DwdError::BlockInfeasible { .. } => SolveError::Infeasible(e.to_string()),
            DwdError::Subproblem {
                status: LpStatus::Infeasible,
                ..
            } => SolveError::Infeasible(e.to_string()),
            other => SolveError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub plan: PlanSolution,
    pub convergence: Option<ConvergenceLog>,
    pub residuals: Vec<FamilyResidual>,
}

impl BlockAngularLp {
    pub fn block_problems(&self) -> Vec<&LpProblem> {
        self.blocks.iter().map(|b| &b.problem).collect()
    }
}

/// Builds the model for `inputs` and solves it in the requested mode.
pub fn solve_plan(inputs: &ModelInputs, options: &SolveOptions) -> Result<SolveReport, SolveError> {
    let model = build_model(inputs);
    solve_model(&model, inputs, options)
}

pub fn solve_model(model: &BlockAngularLp, inputs: &ModelInputs, options: &SolveOptions) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let backend = RevisedSimplex::new(options.simplex.clone());
    let (xs, objective, status, iterations, final_gap, convergence) = match options.mode {
        Mode::Direct => {
            let mono = assemble_monolithic(model);
            let sol = backend.solve(&mono.problem, None)?;
            match sol.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => return Err(SolveError::Infeasible("monolithic LP has no feasible point".into())),
                LpStatus::IterLimit => return Err(SolveError::IterLimit),
                s => return Err(SolveError::Numerical(format!("monolithic solve ended {s:?}"))),
            }
            let xs: Vec<Vec<f64>> = mono.split(&sol.x).into_iter().map(<[f64]>::to_vec).collect();
            (xs, sol.objective, sol.status, sol.iterations, None, None)
        }
        Mode::Dwdcg => {
            let blocks = model.block_problems();
            let view = BlockAngularView {
                blocks: &blocks,
                linking: &model.linking.blocks,
                h0: &model.linking.rhs,
            };
            let out = run_dwd_cg(
                view,
                &DwdOptions {
                    epsilon: options.epsilon,
                    max_iterations: options.max_iterations,
                    threads: options.threads,
                    simplex: options.simplex.clone(),
                },
            )?;
            match out.status {
                LpStatus::Infeasible => {
                    return Err(SolveError::Infeasible("capacity linking rows cannot be satisfied".into()))
                }
                LpStatus::IterLimit if !out.upper_bound.is_finite() => return Err(SolveError::IterLimit),
                _ => {}
            }
            (out.xs, out.objective, out.status, out.iterations, Some(out.final_gap), Some(out.log))
        }
    };
    let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
    let diagnostics = Diagnostics {
        mode: options.mode.name().into(),
        backend: backend.name().into(),
        status,
        iterations,
        final_gap,
        wall_ms: start.elapsed().as_millis() as u64,
    };
    let plan = extract_plan(model, inputs, &refs, objective, diagnostics);
    let residuals = family_residuals(model, &refs);
    Ok(SolveReport {
        plan,
        convergence,
        residuals,
    })
}
