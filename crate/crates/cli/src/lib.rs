//! Batch front end for the PCS pipeline: `enhance`, `compare`, `sweep` and
//! `export-features`.
//!
//! Each command takes a fully resolved [`RunConfig`]; resolution validates
//! every STFT and schedule parameter before any file is opened. Files are
//! processed independently (in parallel with the `parallel` feature) and
//! tables are always ordered by file id, so output never depends on
//! scheduling.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod inputs;

use std::path::PathBuf;

use thiserror::Error;

pub use commands::{cmd_compare, cmd_enhance, cmd_export_features, cmd_sweep, FileFailure, Outcome};
pub use config::{Baseline, ConfigFile, MetricToggles, RunConfig, ScheduleChoice, SweepRange};

/// Process exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL_FAILURE: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;

/// Errors that abort a command before (or instead of) per-file work.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("no inputs: {0}")]
    NoInputs(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

/// Per-file problems; the rest of the batch still runs.
#[derive(Debug, Error)]
pub enum FileError {
    #[error("missing reference {0}")]
    MissingReference(PathBuf),
    #[error("pair mismatch: {0}")]
    PairMismatch(String),
    #[error(transparent)]
    Audio(#[from] pcs_core::AudioError),
    #[error(transparent)]
    Pcs(#[from] pcs_core::PcsError),
    #[error(transparent)]
    Baseline(#[from] pcs_core::BaselineError),
    #[error(transparent)]
    Metrics(#[from] pcs_core::MetricsError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}
