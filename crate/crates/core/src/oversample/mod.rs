//! Resampling: Fair Oversampling (FOS), SMOTE, random oversampling and
//! Reweighing.
//!
//! All oversamplers leave the input rows untouched as a prefix of the output
//! and append synthetic rows after them. Each synthetic row is described by a
//! [`SynthesisRecord`] so the geometry can be audited afterwards.

mod engine;
mod fos;
mod random;
mod reweigh;
mod smote;

use std::io::Write;

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Cell, Dataset};
use crate::exec::Execution;
use crate::neighbors::NeighborError;

pub use fos::{fos, FosPlan};
pub use random::random_oversample;
pub use reweigh::{cell_weights, reweigh, CellWeights};
pub use smote::smote;

#[derive(Debug, Error)]
pub enum OversampleError {
    #[error("dataset has no minority-class rows to oversample")]
    EmptyMinority,
    #[error("cell {0} is empty")]
    EmptyCell(Cell),
    #[error(transparent)]
    Neighbor(#[from] NeighborError),
    #[error("cannot write synthesis records: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OversampleConfig {
    /// Neighbors considered per base row.
    pub k: usize,
    /// Keep the protected column in neighbor distances.
    pub include_protected_in_distance: bool,
    /// Interpolate the protected column like a continuous feature instead of
    /// copying it from the base (experimental; breaks exact cell balance).
    pub interpolate_protected: bool,
    pub execution: Execution,
}

impl Default for OversampleConfig {
    fn default() -> Self {
        Self {
            k: 5,
            include_protected_in_distance: false,
            interpolate_protected: false,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisKind {
    Smote,
    /// FOS phase one: base and neighbor from the same minority cell.
    WithinCell,
    /// FOS phase two: neighbor drawn from the whole minority class.
    WholeMinority,
    /// Exact copy of the base (random oversampling or a fallback).
    Duplicate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisRecord {
    /// Row indices into the input dataset.
    pub base_index: usize,
    pub neighbor_index: usize,
    pub gap: f64,
    pub row: Vec<f64>,
    pub assigned_label: u8,
    pub assigned_protected: u8,
    /// Cell of the base row.
    pub cell: Cell,
    pub kind: SynthesisKind,
}

/// Result of an oversampler.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub dataset: Dataset,
    pub records: Vec<SynthesisRecord>,
    pub warnings: Vec<String>,
    /// Present for FOS only.
    pub plan: Option<FosPlan>,
}

impl Outcome {
    pub(crate) fn unchanged(d: &Dataset) -> Self {
        Self { dataset: d.clone(), records: Vec::new(), warnings: Vec::new(), plan: None }
    }

    pub fn synthetic_rows(&self) -> usize {
        self.records.len()
    }
}

/// `base + gap * (neighbor - base)` on the columns flagged in `interpolated`;
/// every other column is copied from `base`.
pub fn interpolate(
    base: ArrayView1<'_, f64>,
    neighbor: ArrayView1<'_, f64>,
    gap: f64,
    interpolated: &[bool],
) -> Vec<f64> {
    assert_eq!(base.len(), neighbor.len(), "interpolated rows must have equal arity");
    assert_eq!(base.len(), interpolated.len(), "interpolation mask arity");
    base.iter()
        .zip(neighbor.iter())
        .zip(interpolated)
        .map(|((&b, &n), &on)| if on { b + gap * (n - b) } else { b })
        .collect()
}

/// Write records as CSV: `base_index,neighbor_index,r,cell,kind`.
pub fn write_records_csv<W: Write>(records: &[SynthesisRecord], out: W) -> Result<(), OversampleError> {
    let mut w = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| std::io::Error::other(e.to_string());
    w.write_record(["base_index", "neighbor_index", "r", "cell", "kind"]).map_err(to_io)?;
    for r in records {
        let kind = match r.kind {
            SynthesisKind::Smote => "smote",
            SynthesisKind::WithinCell => "within_cell",
            SynthesisKind::WholeMinority => "whole_minority",
            SynthesisKind::Duplicate => "duplicate",
        };
        w.write_record([
            r.base_index.to_string(),
            r.neighbor_index.to_string(),
            r.gap.to_string(),
            r.cell.short_name().to_string(),
            kind.to_string(),
        ])
        .map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Training-set preprocessing arms compared by the experiment harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preprocessor {
    None,
    Smote,
    Fos,
    Ros,
    Reweigh,
}

impl Preprocessor {
    pub const ALL: [Preprocessor; 5] =
        [Preprocessor::None, Preprocessor::Smote, Preprocessor::Fos, Preprocessor::Ros, Preprocessor::Reweigh];

    pub fn name(self) -> &'static str {
        match self {
            Preprocessor::None => "none",
            Preprocessor::Smote => "smote",
            Preprocessor::Fos => "fos",
            Preprocessor::Ros => "ros",
            Preprocessor::Reweigh => "reweigh",
        }
    }

    pub fn apply(self, d: &Dataset, cfg: &OversampleConfig, seed: u64) -> Result<Outcome, OversampleError> {
        match self {
            Preprocessor::None => Ok(Outcome::unchanged(d)),
            Preprocessor::Smote => smote(d, cfg, seed),
            Preprocessor::Fos => fos(d, cfg, seed),
            Preprocessor::Ros => random_oversample(d, seed),
            Preprocessor::Reweigh => Ok(Outcome { dataset: reweigh(d)?, ..Outcome::unchanged(d) }),
        }
    }
}

impl std::str::FromStr for Preprocessor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preprocessor::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preprocessor `{s}`"))
    }
}
