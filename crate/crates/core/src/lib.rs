pub mod cli;
pub mod domain;
pub mod dwd;
pub mod formulation;
pub mod lp;
pub mod metrics;
pub mod solve;
