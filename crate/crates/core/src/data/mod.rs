//! Tabular data: representation, ingestion, subgroup accounting, scaling,
//! cross-validation folds and imbalance-level downsampling.

mod dataset;
mod ingest;
mod partition;
mod scale;
mod split;

use thiserror::Error;

pub use dataset::{ColumnKind, ColumnMeta, Dataset, Origin};
pub(crate) use dataset::AppendedRow;
pub use ingest::{ingest_csv, ingest_reader, CsvSchema, Ingested};
pub use partition::{
    imbalance_ratios, minority_label, partition_subgroups, Cell, CellCounts, RatioReport,
    SubgroupPartition,
};
pub use scale::{standardize_apply, standardize_fit, ColumnScale, ScalerParams};
pub use split::{downsample_to_level, stratified_kfold, FoldPlan, RemovalMode};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("schema error: column `{0}` not found in header")]
    MissingColumn(String),
    #[error("line {line}: row arity differs from the header")]
    Arity { line: u64 },
    #[error("line {line}: value `{value}` in column `{column}` cannot be mapped to 0/1")]
    Unmappable { line: u64, column: String, value: String },
    #[error("line {line}: cannot parse `{value}` in column `{column}` as a number")]
    Parse { line: u64, column: String, value: String },
    #[error("dataset is empty")]
    Empty,
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("degenerate ratio: cell `{cell}` is empty")]
    DegenerateRatio { cell: &'static str },
    #[error("cannot stratify: label {label} has {count} row(s), too few for k = {k}")]
    Stratification { label: u8, count: usize, k: usize },
    #[error("downsampling {count} rows at level {level} leaves none")]
    DegenerateDownsample { count: usize, level: f64 },
    #[error("imbalance level must be a finite number >= 1, got {0}")]
    InvalidLevel(f64),
}

impl DataError {
    pub fn kind(&self) -> &'static str {
        match self {
            DataError::Io(_) => "io",
            DataError::MissingColumn(_) => "schema",
            DataError::Csv(_)
            | DataError::Arity { .. }
            | DataError::Unmappable { .. }
            | DataError::Parse { .. } => "ingestion",
            DataError::Empty => "empty_dataset",
            DataError::Invalid(_) => "invalid_dataset",
            DataError::DegenerateRatio { .. } => "degenerate_ratio",
            DataError::Stratification { .. } => "stratification",
            DataError::DegenerateDownsample { .. } | DataError::InvalidLevel(_) => {
                "degenerate_downsample"
            }
        }
    }
}
