//! Command-line front end for the `pcluster` library.

pub mod app;
pub mod generate;
pub mod report;
