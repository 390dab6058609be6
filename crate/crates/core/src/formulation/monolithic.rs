//! Single LP stacking the linking rows above the block-diagonal rows.

use crate::lp::{LpProblem, TripletBuilder};

use super::BlockAngularLp;

#[derive(Debug, Clone)]
pub struct MonolithicLp {
    pub problem: LpProblem,
    /// First column of each stage block.
    pub col_offsets: Vec<usize>,
    /// First row of each stage block (linking rows come first).
    pub row_offsets: Vec<usize>,
}

impl MonolithicLp {
    /// Splits a stacked primal vector into per-stage pieces.
    pub fn split<'a>(&self, x: &'a [f64]) -> Vec<&'a [f64]> {
        let mut out = Vec::with_capacity(self.col_offsets.len());
        for (i, &start) in self.col_offsets.iter().enumerate() {
            let end = self.col_offsets.get(i + 1).copied().unwrap_or(x.len());
            out.push(&x[start..end]);
        }
        out
    }
}

pub fn assemble_monolithic(model: &BlockAngularLp) -> MonolithicLp {
    let link_rows = model.linking.num_rows();
    let mut col_offsets = Vec::with_capacity(model.blocks.len());
    let mut row_offsets = Vec::with_capacity(model.blocks.len());
    let (mut cols, mut rows) = (0, link_rows);
    for b in &model.blocks {
        col_offsets.push(cols);
        row_offsets.push(rows);
        cols += b.dim();
        rows += b.num_rows();
    }
    let mut trip = TripletBuilder::new();
    for (i, bmat) in model.linking.blocks.iter().enumerate() {
        for (r, c, v) in bmat.triplets() {
            trip.push(r, col_offsets[i] + c, v);
        }
    }
    let mut rhs = model.linking.rhs.clone();
    let mut cost = Vec::with_capacity(cols);
    let mut lower = Vec::with_capacity(cols);
    let mut upper = Vec::with_capacity(cols);
    for (i, b) in model.blocks.iter().enumerate() {
        for (r, c, v) in b.problem.a.triplets() {
            trip.push(row_offsets[i] + r, col_offsets[i] + c, v);
        }
        rhs.extend_from_slice(&b.problem.rhs);
        cost.extend_from_slice(&b.problem.cost);
        lower.extend_from_slice(&b.problem.lower);
        upper.extend_from_slice(&b.problem.upper);
    }
    MonolithicLp {
        problem: LpProblem::new(trip.build(rows, cols), rhs, cost, lower, upper),
        col_offsets,
        row_offsets,
    }
}
