use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::sparse::CscMatrix;
use super::LpError;

/// Equality-form LP: `min cᵀx  s.t.  A x = b,  l ≤ x ≤ u`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub a: CscMatrix,
    pub rhs: Vec<f64>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(a: CscMatrix, rhs: Vec<f64>, cost: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self {
            a,
            rhs,
            cost,
            lower,
            upper,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn num_cols(&self) -> usize {
        self.a.ncols()
    }

    /// Checks dimensions, finiteness and that every row has a nonzero.
    pub fn validate(&self) -> Result<(), LpError> {
        let (m, n) = (self.num_rows(), self.num_cols());
        if self.rhs.len() != m || self.cost.len() != n || self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Dimension(format!(
                "A is {m}x{n}, rhs {}, cost {}, bounds {}/{}",
                self.rhs.len(),
                self.cost.len(),
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.a.values().iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("constraint matrix".into()));
        }
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("right-hand side".into()));
        }
        if self.cost.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("cost vector".into()));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(LpError::NonFinite(format!("bounds of column {j}")));
            }
        }
        if let Some(r) = self.a.row_counts().iter().position(|&c| c == 0) {
            return Err(LpError::EmptyRow(r));
        }
        Ok(())
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Largest absolute violation of `A x = b`.
    pub fn primal_residual(&self, x: &[f64]) -> f64 {
        let ax = self.a.mul_vec(x);
        ax.iter()
            .zip(&self.rhs)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest absolute bound violation.
    pub fn bound_violation(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .fold(0.0f64, |m, (&v, (&l, &u))| m.max(l - v).max(v - u))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
    Numerical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    Free,
}

/// Basis snapshot usable as a warm start: one status per structural column
/// followed by one per row logical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub columns: Vec<VarStatus>,
    pub logicals: Vec<VarStatus>,
}

impl Basis {
    /// Extends the snapshot with `extra` new nonbasic columns at their lower bound.
    pub fn with_new_columns(&self, extra: usize) -> Basis {
        let mut columns = self.columns.clone();
        columns.extend(std::iter::repeat_n(VarStatus::AtLower, extra));
        Basis {
            columns,
            logicals: self.logicals.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// Row duals `y` with reduced costs `d = c − Aᵀy`.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub basis: Option<Basis>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Dual objective `bᵀy + Σ d_j·(bound the column rests at)`.
    pub fn dual_objective(&self, problem: &LpProblem) -> f64 {
        let by: f64 = problem.rhs.iter().zip(&self.duals).map(|(b, y)| b * y).sum();
        let bound_terms: f64 = (0..problem.num_cols())
            .map(|j| {
                let d = self.reduced_costs[j];
                if d > 0.0 && problem.lower[j].is_finite() {
                    d * problem.lower[j]
                } else if d < 0.0 && problem.upper[j].is_finite() {
                    d * problem.upper[j]
                } else {
                    d * self.x[j]
                }
            })
            .sum();
        by + bound_terms
    }
}

/// Dual sub-vector for a contiguous row range of an optimal solve.
pub fn extract_duals(solution: &LpSolution, rows: Range<usize>) -> Result<Vec<f64>, LpError> {
    if solution.status != LpStatus::Optimal {
        return Err(LpError::NotOptimal(solution.status));
    }
    solution
        .duals
        .get(rows.clone())
        .map(<[f64]>::to_vec)
        .ok_or_else(|| LpError::Dimension(format!("row range {rows:?} outside {} duals", solution.duals.len())))
}

/// Solver contract shared by the direct oracle and the decomposition engine.
/// Any backend whose solutions satisfy the optimality residual checks is
/// admissible.
pub trait LpBackend: Send + Sync {
    fn name(&self) -> &str;

    fn solve(&self, problem: &LpProblem, warm_start: Option<&Basis>) -> Result<LpSolution, LpError>;
}
