//! Translation of validated inputs into the block-angular planning LP.

pub mod block;
pub mod extract;
pub mod index;
pub mod linking;
pub mod monolithic;
pub mod transient;

use rayon::prelude::*;

use crate::domain::ModelInputs;

pub use block::{build_stage_block, RowFamily, StageBlock};
pub use extract::{cost_breakdown, extract_plan, family_residuals, FamilyResidual};
pub use index::VariableIndexMap;
pub use linking::{build_linking_constraints, LinkingConstraints};
pub use monolithic::{assemble_monolithic, MonolithicLp};

/// Per-stage blocks plus the rows coupling them.
#[derive(Debug, Clone)]
pub struct BlockAngularLp {
    pub blocks: Vec<StageBlock>,
    pub linking: LinkingConstraints,
}

impl BlockAngularLp {
    pub fn stages(&self) -> usize {
        self.blocks.len()
    }

    /// `Σ_i c_iᵀ x_i`
    pub fn objective(&self, xs: &[&[f64]]) -> f64 {
        self.blocks.iter().zip(xs).map(|(b, x)| b.problem.objective(x)).sum()
    }
}

pub fn build_model(inputs: &ModelInputs) -> BlockAngularLp {
    let blocks: Vec<StageBlock> = (1..=inputs.planning.stages)
        .into_par_iter()
        .map(|s| build_stage_block(s, inputs))
        .collect();
    let linking = build_linking_constraints(&blocks);
    BlockAngularLp { blocks, linking }
}
