//! Config-driven experiments: cross-validated runs, imbalance sweeps,
//! feature-importance reports and the synthetic biased-data generator.

mod config;
mod pipeline;
mod report;
pub mod synth;

pub use config::{parse_config_text, ClassifierConfig, DataSource, ExperimentConfig, Flags};
pub use pipeline::{
    feature_importance_report, imbalance_sweep, load_dataset, run_experiment, run_experiment_at_level, run_experiment_audited, CurvePoint,
    FoldAudit, FoldFailure, FoldReport, ImportanceReport, LoadedData, MeanMetrics, RunReport, StageTimings,
    SweepPoint, SweepReport,
};
pub use report::{emit, emit_to_path, fmt4, Format, Report, IMPORTANCE_CSV_HEADER, RUN_CSV_HEADER, SWEEP_CSV_HEADER};
pub use synth::SynthConfig;

use crate::data::DataError;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{} fold(s) failed: {}", .0.len(), describe(.0))]
    FoldsFailed(Vec<FoldFailure>),
    #[error(transparent)]
    Preprocess(#[from] crate::oversample::OversampleError),
    #[error(transparent)]
    Model(#[from] crate::linear::ModelError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub(crate) fn describe(f: &[FoldFailure]) -> String {
    f.iter().map(|x| format!("fold {}: {}", x.fold, x.reason)).collect::<Vec<_>>().join("; ")
}

impl ExperimentError {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentError::Data(e) => e.kind(),
            ExperimentError::Config(_) => "config",
            ExperimentError::FoldsFailed(_) => "fold_failed",
            ExperimentError::Preprocess(_) => "oversample",
            ExperimentError::Model(_) => "model",
            ExperimentError::Io(_) => "io",
            ExperimentError::Csv(_) => "csv",
            ExperimentError::Json(_) => "json",
        }
    }
}
