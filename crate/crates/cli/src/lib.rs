//! Randomized verification harness for `tslab-core`: one command per
//! property family, seeded per-trial substreams, JSON and CSV reports.

// Negated comparisons are deliberate: they route NaN to the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
pub use report::{Report, Row};
