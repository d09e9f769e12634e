//! Experiment runners behind the command-line front end.
//!
//! Each runner sweeps a grid in parallel, assembles one [`ReportRow`] per grid
//! point in grid order, and appends summary rows. Every verdict is a
//! comparison recorded in the row itself, so a report can be re-checked from
//! its numbers alone.

mod config;
mod report;
mod runners;

pub use config::{resolve, ConfigPatch, Experiment, ExperimentConfig, Family, Format, LambdaGrid, M_SCAN};
pub use report::{Check, Op, Report, ReportRow, RowKind};
pub use runners::*;
