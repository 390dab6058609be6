//! Restricted master over the extreme-point pool.

use crate::lp::{Basis, LpBackend, LpError, LpProblem, LpStatus, TripletBuilder};

use super::pool::ExtremePointPool;

#[derive(Debug, Clone)]
pub struct MasterOutcome {
    pub status: LpStatus,
    /// Master objective including any artificial cost.
    pub objective: f64,
    /// One weight per pool column, in pool order.
    pub weights: Vec<f64>,
    /// Total activity of the artificial columns.
    pub artificial_sum: f64,
    /// Duals of the convexity rows, one per block.
    pub alpha: Vec<f64>,
    /// Duals of the linking rows.
    pub beta: Vec<f64>,
    pub basis: Option<Basis>,
    pub iterations: usize,
}

/// Rows: linking rows, then one convexity row per block.
/// Columns: artificials (`+e_r`, `−e_r` per linking row), then pool columns.
pub fn build_master(pool: &ExtremePointPool, h0: &[f64]) -> LpProblem {
    let l = pool.linking_rows;
    let s = pool.stages();
    let na = pool.artificial_count();
    let n = na + pool.columns.len();
    let mut trip = TripletBuilder::new();
    let mut cost = Vec::with_capacity(n);
    for r in 0..l {
        trip.push(r, r, 1.0);
        trip.push(r, l + r, -1.0);
    }
    cost.extend(std::iter::repeat_n(pool.artificial_cost, na));
    for (j, col) in pool.columns.iter().enumerate() {
        for (r, &v) in col.linking.iter().enumerate() {
            if v != 0.0 {
                trip.push(r, na + j, v);
            }
        }
        trip.push(l + col.stage, na + j, 1.0);
        cost.push(col.cost);
    }
    let mut rhs = h0.to_vec();
    rhs.extend(std::iter::repeat_n(1.0, s));
    LpProblem::new(trip.build(l + s, n), rhs, cost, vec![0.0; n], vec![f64::INFINITY; n])
}

pub fn solve_master(
    backend: &dyn LpBackend,
    pool: &ExtremePointPool,
    h0: &[f64],
    warm_start: Option<&Basis>,
) -> Result<MasterOutcome, LpError> {
    let problem = build_master(pool, h0);
    let sol = backend.solve(&problem, warm_start)?;
    let l = pool.linking_rows;
    let na = pool.artificial_count();
    let artificial_sum = sol.x[..na].iter().sum();
    Ok(MasterOutcome {
        status: sol.status,
        objective: sol.objective,
        weights: sol.x[na..].to_vec(),
        artificial_sum,
        alpha: sol.duals[l..].to_vec(),
        beta: sol.duals[..l].to_vec(),
        basis: sol.basis,
        iterations: sol.iterations,
    })
}
