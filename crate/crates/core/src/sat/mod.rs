//! SAT-based instance generators.

pub mod cnf;
pub mod eth;
pub mod multivariate;
pub mod regularize;
