//! Inter-stage capacity recursion rows.

use crate::domain::Facility;
use crate::lp::{CscMatrix, TripletBuilder};

use super::block::StageBlock;

/// Rows `C_s − C_{s−1} − ΔC_s (+ ΔC_reti for CFPP) = 0` for `s ≥ 2`, one
/// per facility, ordered by stage then facility. `blocks[i]` holds the
/// coefficients on stage `i+1`'s columns.
#[derive(Debug, Clone)]
pub struct LinkingConstraints {
    pub blocks: Vec<CscMatrix>,
    pub rhs: Vec<f64>,
    pub labels: Vec<String>,
}

impl LinkingConstraints {
    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }
}

pub fn build_linking_constraints(blocks: &[StageBlock]) -> LinkingConstraints {
    let stages = blocks.len();
    let rows = stages.saturating_sub(1) * Facility::COUNT;
    let mut trips: Vec<TripletBuilder> = (0..stages).map(|_| TripletBuilder::new()).collect();
    let mut labels = Vec::with_capacity(rows);
    for s in 1..stages {
        let (prev, cur) = (&blocks[s - 1].index, &blocks[s].index);
        for f in Facility::ALL {
            let r = (s - 1) * Facility::COUNT + f.index();
            trips[s].push(r, cur.capacity(f), 1.0);
            trips[s].push(r, cur.added(f), -1.0);
            if f == Facility::Cfpp {
                trips[s].push(r, cur.retired(), 1.0);
            }
            trips[s - 1].push(r, prev.capacity(f), -1.0);
            labels.push(format!("capacity_link[s={},{}]", s + 1, f.label()));
        }
    }
    LinkingConstraints {
        blocks: trips
            .iter()
            .zip(blocks)
            .map(|(t, b)| t.build(rows, b.dim()))
            .collect(),
        rhs: vec![0.0; rows],
        labels,
    }
}
