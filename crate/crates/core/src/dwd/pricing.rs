//! Dual-priced block subproblems.

use crate::lp::{Basis, CscMatrix, LpBackend, LpError, LpProblem, LpStatus};

#[derive(Debug, Clone)]
pub struct PricingResult {
    pub status: LpStatus,
    /// Vertex optimal for the priced cost, projected onto the variable bounds.
    pub point: Vec<f64>,
    /// `(c_i − B_iᵀβ)ᵀ x_i`
    pub priced_objective: f64,
    /// `priced_objective − α_i`
    pub reduced_cost: f64,
    pub basis: Option<Basis>,
    pub iterations: usize,
}

/// `c_i − B_iᵀβ`
pub fn priced_cost(block: &LpProblem, linking: &CscMatrix, beta: &[f64]) -> Vec<f64> {
    let bt = linking.tr_mul_vec(beta);
    block.cost.iter().zip(bt).map(|(c, b)| c - b).collect()
}

pub fn price_subproblem(
    backend: &dyn LpBackend,
    block: &LpProblem,
    linking: &CscMatrix,
    alpha: f64,
    beta: &[f64],
    warm_start: Option<&Basis>,
) -> Result<PricingResult, LpError> {
    let mut priced = block.clone();
    priced.cost = priced_cost(block, linking, beta);
    let sol = backend.solve(&priced, warm_start)?;
    let point: Vec<f64> = sol
        .x
        .iter()
        .zip(block.lower.iter().zip(&block.upper))
        .map(|(&x, (&l, &u))| x.clamp(l, u))
        .collect();
    let priced_objective = priced.objective(&point);
    Ok(PricingResult {
        status: sol.status,
        point,
        priced_objective,
        reduced_cost: priced_objective - alpha,
        basis: sol.basis,
        iterations: sol.iterations,
    })
}

/// Worst relative row violation `|a_r·x − b_r| / (1 + max(|b_r|, max_j |a_rj x_j|))`
/// together with the worst bound violation.
pub fn block_violation(block: &LpProblem, x: &[f64]) -> f64 {
    let m = block.num_rows();
    let mut ax = vec![0.0; m];
    let mut scale = vec![0.0f64; m];
    for j in 0..block.num_cols() {
        let (rows, vals) = block.a.col(j);
        for (&r, &v) in rows.iter().zip(vals) {
            ax[r] += v * x[j];
            scale[r] = scale[r].max((v * x[j]).abs());
        }
    }
    let rows = (0..m).fold(0.0f64, |w, r| {
        w.max((ax[r] - block.rhs[r]).abs() / (1.0 + scale[r].max(block.rhs[r].abs())))
    });
    rows.max(block.bound_violation(x))
}

/// Rows left unsatisfied by the point an infeasible solve stopped at.
pub fn infeasible_rows(block: &LpProblem, x: &[f64], tol: f64) -> Vec<usize> {
    let ax = block.a.mul_vec(x);
    ax.iter()
        .zip(&block.rhs)
        .enumerate()
        .filter(|(_, (a, b))| (*a - *b).abs() > tol * (1.0 + b.abs()))
        .map(|(r, _)| r)
        .collect()
}
