//! Sparse LP storage, the solver contract and the reference simplex backend.

pub mod lu;
pub mod mps;
pub mod problem;
pub mod simplex;
pub mod sparse;

pub use problem::{extract_duals, Basis, LpBackend, LpProblem, LpSolution, LpStatus, VarStatus};
pub use simplex::{RevisedSimplex, SimplexOptions};
pub use sparse::{CscMatrix, TripletBuilder};

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite data in {0}")]
    NonFinite(String),
    #[error("row {0} has no nonzero coefficient")]
    EmptyRow(usize),
    #[error("solution status is {0:?}, duals unavailable")]
    NotOptimal(LpStatus),
}
