//! Append-only store of block extreme points.

use std::collections::HashSet;
use std::hash::{DefaultHasher, Hash, Hasher};

use crate::lp::CscMatrix;

/// One extreme point of a block with its cached cost and linking image.
#[derive(Debug, Clone)]
pub struct PoolColumn {
    pub stage: usize,
    pub point: Vec<f64>,
    /// `c_iᵀ v`
    pub cost: f64,
    /// `B_i v`, dense over the linking rows.
    pub linking: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExtremePointPool {
    /// Columns in insertion order, which is also their master column order.
    pub columns: Vec<PoolColumn>,
    /// Cost of each artificial column on the linking rows.
    pub artificial_cost: f64,
    pub linking_rows: usize,
    seen: Vec<HashSet<u64>>,
}

/// Hash of the point rounded to a 1e-9 grid.
pub fn point_hash(point: &[f64]) -> u64 {
    let mut h = DefaultHasher::new();
    for v in point {
        let q = (v * 1e9).round();
        // Fold -0 onto 0 so sign of zero never splits duplicates.
        let q = if q == 0.0 { 0.0 } else { q };
        q.to_bits().hash(&mut h);
    }
    h.finish()
}

impl ExtremePointPool {
    pub fn new(stages: usize, linking_rows: usize, artificial_cost: f64) -> Self {
        Self {
            columns: Vec::new(),
            artificial_cost,
            linking_rows,
            seen: vec![HashSet::new(); stages],
        }
    }

    pub fn stages(&self) -> usize {
        self.seen.len()
    }

    /// Artificial columns come first in the master: `+e_r` then `−e_r` per row.
    pub fn artificial_count(&self) -> usize {
        2 * self.linking_rows
    }

    pub fn stage_len(&self, stage: usize) -> usize {
        self.columns.iter().filter(|c| c.stage == stage).count()
    }

    pub fn contains(&self, stage: usize, point: &[f64]) -> bool {
        self.seen[stage].contains(&point_hash(point))
    }

    /// Inserts unless an identical (to 1e-9) point is already stored for
    /// the stage. Returns whether the column was added.
    pub fn insert(&mut self, stage: usize, point: Vec<f64>, cost: &[f64], linking: &CscMatrix) -> bool {
        if !self.seen[stage].insert(point_hash(&point)) {
            return false;
        }
        let c = cost.iter().zip(&point).map(|(c, x)| c * x).sum();
        let image = linking.mul_vec(&point);
        self.columns.push(PoolColumn {
            stage,
            point,
            cost: c,
            linking: image,
        });
        true
    }

    /// `x_i = Σ_j λ_ij v_ij` for every block, given one weight per pool column.
    /// Weights are clipped at zero and renormalized per stage first, so each
    /// block point is an exact convex combination of its columns.
    pub fn recover(&self, weights: &[f64], dims: &[usize]) -> Vec<Vec<f64>> {
        let mut xs: Vec<Vec<f64>> = dims.iter().map(|&d| vec![0.0; d]).collect();
        let mut totals = vec![0.0; dims.len()];
        for (col, &w) in self.columns.iter().zip(weights) {
            totals[col.stage] += w.max(0.0);
        }
        for (col, &w) in self.columns.iter().zip(weights) {
            if w <= 0.0 {
                continue;
            }
            let w = w / totals[col.stage];
            for (x, v) in xs[col.stage].iter_mut().zip(&col.point) {
                *x += w * v;
            }
        }
        xs
    }
}
