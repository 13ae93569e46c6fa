//! Experiment runner for `kolmo-core`: TOML configs, the KLFS snapshot
//! format, deterministic CSV reports, SVG plots and run manifests.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod run;
pub mod snapshot;
pub mod svg;

pub use config::{ExperimentConfig, ExperimentKind};
pub use run::{run, Outcome, RunError};
