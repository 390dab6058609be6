//! Dantzig-Wolfe column generation over the stage blocks.
//!
//! The restricted master holds convex weights over stored block extreme
//! points. Each round the master duals re-price every block; blocks whose
//! priced optimum has negative reduced cost contribute a new column. The
//! master objective (when no artificial is active) is an upper bound, and
//! the Lagrangian value of the duals is a lower bound.

pub mod master;
pub mod pool;
pub mod pricing;

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::lp::{Basis, CscMatrix, LpBackend, LpError, LpProblem, LpStatus, RevisedSimplex, SimplexOptions};

pub use master::{build_master, solve_master, MasterOutcome};
pub use pool::{ExtremePointPool, PoolColumn};
pub use pricing::{block_violation, price_subproblem, priced_cost, PricingResult};

/// Relative feasibility a column must meet to enter the pool.
pub const COLUMN_FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum DwdError {
    #[error("stage {stage} operational model infeasible (rows {rows:?})")]
    BlockInfeasible { stage: usize, rows: Vec<usize> },
    #[error("stage {stage} subproblem ended {status:?}")]
    Subproblem { stage: usize, status: LpStatus },
    #[error("restricted master ended {0:?}")]
    Master(LpStatus),
    #[error("stage {stage} column violates its block by {violation:e}")]
    InfeasibleColumn { stage: usize, violation: f64 },
    #[error("thread pool: {0}")]
    Threads(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Block-angular problem: `min Σ c_iᵀx_i  s.t.  Σ B_i x_i = h0,  A_i x_i = h_i`.
#[derive(Debug, Clone, Copy)]
pub struct BlockAngularView<'a> {
    pub blocks: &'a [&'a LpProblem],
    /// `B_i`, one per block, each with `h0.len()` rows.
    pub linking: &'a [CscMatrix],
    pub h0: &'a [f64],
}

#[derive(Debug, Clone)]
pub struct DwdOptions {
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Concurrent pricing solves; 0 lets the runtime decide.
    pub threads: usize,
    pub simplex: SimplexOptions,
}

impl Default for DwdOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            max_iterations: 100,
            threads: 0,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub iter: usize,
    pub ub: f64,
    /// Best lower bound so far.
    pub lb: f64,
    pub gap: f64,
    pub cols_added: usize,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceLog {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceLog {
    /// CSV `iter,ub,lb,gap,cols_added,wall_ms`; `zero_wall` blanks timing to 0
    /// for byte-reproducible output.
    pub fn to_csv(&self, zero_wall: bool) -> String {
        let mut out = String::from("iter,ub,lb,gap,cols_added,wall_ms\n");
        for r in &self.rows {
            let wall = if zero_wall { 0 } else { r.wall_ms };
            let _ = writeln!(out, "{},{},{},{},{},{}", r.iter, r.ub, r.lb, r.gap, r.cols_added, wall);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(format!("line {}: expected 6 fields", i + 1));
            }
            let num = |k: usize| f[k].parse::<f64>().map_err(|e| format!("line {}: {e}", i + 1));
            let int = |k: usize| f[k].parse::<u64>().map_err(|e| format!("line {}: {e}", i + 1));
            rows.push(ConvergenceRow {
                iter: int(0)? as usize,
                ub: num(1)?,
                lb: num(2)?,
                gap: num(3)?,
                cols_added: int(4)? as usize,
                wall_ms: int(5)?,
            });
        }
        Ok(Self { rows })
    }
}

#[derive(Debug, Clone)]
pub struct DwdOutcome {
    /// `Optimal` on convergence, `IterLimit` when the budget ran out, or
    /// `Infeasible` when artificials stay active.
    pub status: LpStatus,
    /// Recovered block primals `Σ_j λ_ij v_ij`.
    pub xs: Vec<Vec<f64>>,
    /// `Σ c_iᵀ x_i` of the recovered point.
    pub objective: f64,
    /// Final master objective (includes any artificial cost).
    pub master_objective: f64,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub final_gap: f64,
    pub iterations: usize,
    pub lp_iterations: usize,
    pub pool_size: usize,
    pub log: ConvergenceLog,
}

/// `|UB − LB| / |UB|`, with `|UB|` floored at 1e-12.
pub fn relative_gap(ub: f64, lb: f64) -> f64 {
    if !ub.is_finite() || !lb.is_finite() {
        return f64::INFINITY;
    }
    (ub - lb).abs() / ub.abs().max(1e-12)
}

fn power_of_two_near(v: f64) -> f64 {
    2f64.powi(v.max(1.0).log2().round() as i32)
}

struct Pricer<'a> {
    backend: RevisedSimplex,
    problem: BlockAngularView<'a>,
    bases: Vec<Option<Basis>>,
}

impl Pricer<'_> {
    fn round(&mut self, alpha: &[f64], beta: &[f64], pool: &rayon::ThreadPool) -> Result<Vec<PricingResult>, DwdError> {
        let p = self.problem;
        let backend = &self.backend;
        let bases = &self.bases;
        let results: Vec<Result<PricingResult, LpError>> = pool.install(|| {
            (0..p.blocks.len())
                .into_par_iter()
                .map(|i| price_subproblem(backend, p.blocks[i], &p.linking[i], alpha[i], beta, bases[i].as_ref()))
                .collect()
        });
        let mut out = Vec::with_capacity(results.len());
        for (i, r) in results.into_iter().enumerate() {
            let r = r?;
            if r.status != LpStatus::Optimal {
                return Err(DwdError::Subproblem { stage: i, status: r.status });
            }
            self.bases[i] = r.basis.clone();
            out.push(r);
        }
        Ok(out)
    }
}

fn add_column(
    pool: &mut ExtremePointPool,
    view: BlockAngularView<'_>,
    stage: usize,
    point: Vec<f64>,
) -> Result<bool, DwdError> {
    let block = view.blocks[stage];
    let violation = block_violation(block, &point);
    if violation > COLUMN_FEASIBILITY_TOL {
        return Err(DwdError::InfeasibleColumn { stage, violation });
    }
    Ok(pool.insert(stage, point, &block.cost, &view.linking[stage]))
}

pub fn run_dwd_cg(view: BlockAngularView<'_>, options: &DwdOptions) -> Result<DwdOutcome, DwdError> {
    let start = Instant::now();
    let stages = view.blocks.len();
    let l = view.h0.len();
    let threads = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| DwdError::Threads(e.to_string()))?;
    let mut pricer = Pricer {
        backend: RevisedSimplex::new(options.simplex.clone()),
        problem: view,
        bases: vec![None; stages],
    };
    let mut lp_iterations = 0;

    // Seed one genuine column per block from its own cost.
    let zero_alpha = vec![0.0; stages];
    let zero_beta = vec![0.0; l];
    let seeds = match pricer.round(&zero_alpha, &zero_beta, &threads) {
        Err(DwdError::Subproblem {
            stage,
            status: LpStatus::Infeasible,
        }) => {
            let block = view.blocks[stage];
            let sol = pricer.backend.solve(block, None)?;
            let rows = pricing::infeasible_rows(block, &sol.x, options.simplex.feasibility_tol);
            return Err(DwdError::BlockInfeasible { stage, rows });
        }
        other => other?,
    };
    let seed_cost: f64 = seeds.iter().map(|r| r.priced_objective).sum();
    let scale = 1.0 + seed_cost.abs();
    let mut pool = ExtremePointPool::new(stages, l, 1e6 * scale);
    for (i, r) in seeds.into_iter().enumerate() {
        lp_iterations += r.iterations;
        add_column(&mut pool, view, i, r.point)?;
    }

    // The master mixes genuine costs with big-M ones. Fixing the cost scale
    // to the genuine magnitude and leaving columns unscaled makes the
    // master's optimality tolerance an absolute bound on reduced costs close
    // to `tol_rc`, so an optimal master never leaves a stored column priced
    // below the entry threshold.
    let master_backend = RevisedSimplex::new(SimplexOptions {
        cost_scale: Some(power_of_two_near(scale)),
        scaling: false,
        optimality_tol: options.simplex.optimality_tol.min(1e-9),
        // Weights multiply columns of large magnitude, so their sign
        // tolerance must be far below the blocks' one.
        feasibility_tol: options.simplex.feasibility_tol.min(1e-11),
        ..options.simplex.clone()
    });
    let artificial_tol = 1e-9 * (1.0 + view.h0.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let dims: Vec<usize> = view.blocks.iter().map(|b| b.num_cols()).collect();

    let mut log = ConvergenceLog::default();
    let mut ub = f64::INFINITY;
    let mut best_lb = f64::NEG_INFINITY;
    let mut gap = f64::INFINITY;
    let mut master_basis: Option<Basis> = None;
    let mut incumbent: Option<Vec<f64>> = None;
    let mut last_master: Option<MasterOutcome> = None;
    let mut status = LpStatus::IterLimit;
    let mut iterations = 0;

    for k in 1..=options.max_iterations.max(1) {
        iterations = k;
        let m = solve_master(&master_backend, &pool, view.h0, master_basis.as_ref())?;
        lp_iterations += m.iterations;
        if m.status != LpStatus::Optimal {
            return Err(DwdError::Master(m.status));
        }
        let tol_rc = 1e-8 * (1.0 + m.objective.abs());
        if m.artificial_sum <= artificial_tol {
            if m.objective <= ub {
                ub = m.objective;
                incumbent = Some(m.weights.clone());
            }
        }

        let priced = pricer.round(&m.alpha, &m.beta, &threads)?;
        let lb: f64 = m.beta.iter().zip(view.h0).map(|(b, h)| b * h).sum::<f64>()
            + priced.iter().map(|r| r.priced_objective).sum::<f64>();
        best_lb = best_lb.max(lb);
        gap = relative_gap(ub, best_lb);

        let mut added = 0;
        for (i, r) in priced.into_iter().enumerate() {
            lp_iterations += r.iterations;
            if r.reduced_cost < -tol_rc && add_column(&mut pool, view, i, r.point)? {
                added += 1;
            }
        }
        log.rows.push(ConvergenceRow {
            iter: k,
            ub,
            lb: best_lb,
            gap,
            cols_added: added,
            wall_ms: start.elapsed().as_millis() as u64,
        });
        log::debug!("cg iter {k}: ub {ub:e} lb {best_lb:e} gap {gap:e} added {added}");

        let active_artificials = m.artificial_sum > artificial_tol;
        master_basis = m.basis.as_ref().map(|b| b.with_new_columns(added));
        last_master = Some(m);
        if gap < options.epsilon {
            status = LpStatus::Optimal;
            break;
        }
        if added == 0 {
            status = if active_artificials {
                LpStatus::Infeasible
            } else {
                LpStatus::Optimal
            };
            break;
        }
    }

    let last = last_master.expect("at least one master solve");
    let weights = incumbent.unwrap_or_else(|| last.weights.clone());
    let xs = pool.recover(&weights, &dims);
    let objective = xs
        .iter()
        .zip(view.blocks)
        .map(|(x, b)| b.objective(x))
        .sum();
    Ok(DwdOutcome {
        status,
        xs,
        objective,
        master_objective: if ub.is_finite() { ub } else { last.objective },
        upper_bound: ub,
        lower_bound: best_lb,
        final_gap: gap,
        iterations,
        lp_iterations,
        pool_size: pool.columns.len(),
        log,
    })
}
