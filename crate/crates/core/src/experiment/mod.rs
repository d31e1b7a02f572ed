//! Configured experiment runs: presets, per-seed simulation with auditing,
//! record and report files, and cross-seed summaries.

mod config;
mod presets;
mod run;
mod summary;

use std::path::PathBuf;

pub use config::{
    build_instance, constant_context_mdp, tabular_as_contextual, AlgorithmSpec, BuiltInstance, EnvironmentSpec,
    ExperimentConfig, Fault, OutputConfig, Overrides, DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV,
};
pub use presets::{preset_toml, Preset, PRESETS};
pub use run::{
    run_experiment, run_seed, simulate, IpocReport, RecordFilter, SeedRun, RECORD_SCHEMA_VERSION,
    REPORT_SCHEMA_VERSION,
};
pub use summary::{export_csv, read_records, summarize, MetricSummary, Summary};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {reason}", path.display())]
    BadInput { path: PathBuf, reason: String },
    #[error(transparent)]
    Model(#[from] crate::Error),
}

impl ExperimentError {
    /// Process exit code: 2 for configuration and input problems, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Io { .. } => 3,
            _ => 2,
        }
    }
}
