//! Synthetic biased data: Gaussian blobs per class, with the
//! unprivileged-minority blob pulled toward the majority class.

use std::io::Write;

use ndarray::Array2;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::data::{CellCounts, ColumnMeta, CsvSchema, Dataset};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub counts: CellCounts,
    /// Continuous feature dimensions; a binary `group` column is added.
    pub dims: usize,
    /// Distance between the class means.
    pub separation: f64,
    /// How far the unprivileged-minority mean is moved back toward the
    /// majority mean.
    pub unprivileged_shift: f64,
    /// Per-coordinate standard deviation.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            counts: CellCounts::new(400, 200, 150, 100),
            dims: 4,
            separation: 2.5,
            unprivileged_shift: 1.5,
            noise: 1.0,
            seed: 0,
        }
    }
}

/// Column name of the protected indicator in generated data.
pub const GROUP_COLUMN: &str = "group";
pub const LABEL_COLUMN: &str = "label";

/// Generate rows cell by cell (prmaj, upmaj, prmin, upmin). The minority
/// class carries label 1.
pub fn generate(cfg: &SynthConfig) -> Result<Dataset, ExperimentError> {
    if cfg.dims == 0 {
        return Err(ExperimentError::Config("synthetic dims must be >= 1".into()));
    }
    let noise = Normal::new(0.0, cfg.noise)
        .map_err(|e| ExperimentError::Config(format!("synthetic noise: {e}")))?;
    let mut rng = seed::rng(seed::derive(cfg.seed, &[seed::tag::SYNTH]));
    let axis = 1.0 / (cfg.dims as f64).sqrt();
    let c = cfg.counts;
    let cells = [
        (c.prmaj, 0u8, 1u8, 0.0),
        (c.upmaj, 0, 0, 0.0),
        (c.prmin, 1, 1, cfg.separation),
        (c.upmin, 1, 0, cfg.separation - cfg.unprivileged_shift),
    ];
    let n = c.total();
    let d = cfg.dims + 1;
    let mut x = Array2::zeros((n, d));
    let mut labels = Vec::with_capacity(n);
    let mut protected = Vec::with_capacity(n);
    let mut row = 0;
    for (count, label, group, offset) in cells {
        for _ in 0..count {
            for j in 0..cfg.dims {
                x[[row, j]] = offset * axis + noise.sample(&mut rng);
            }
            x[[row, cfg.dims]] = f64::from(group);
            labels.push(label);
            protected.push(group);
            row += 1;
        }
    }
    let mut columns: Vec<ColumnMeta> = (0..cfg.dims).map(|j| ColumnMeta::continuous(format!("x{j}"))).collect();
    columns.push(ColumnMeta::binary(GROUP_COLUMN));
    Ok(Dataset::new(x, labels, protected, columns, Some(cfg.dims))?)
}

/// Schema that ingests the output of [`write_csv`] back into an equal
/// dataset.
pub fn schema() -> CsvSchema {
    CsvSchema {
        label: LABEL_COLUMN.into(),
        positive: "1".into(),
        negative: Some("0".into()),
        protected: GROUP_COLUMN.into(),
        privileged: "privileged".into(),
        unprivileged: Some("unprivileged".into()),
        categorical: vec![],
        binary: vec![],
        ignore: vec![],
    }
}

/// Write a generated dataset as CSV (`x0..x{d-1},group,label`).
pub fn write_csv<W: Write>(d: &Dataset, out: W) -> Result<(), ExperimentError> {
    let pc = d.protected_column();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = d.columns().iter().map(|c| c.name.clone()).collect();
    header.push(LABEL_COLUMN.into());
    w.write_record(&header)?;
    for i in 0..d.n_rows() {
        let mut rec: Vec<String> = d
            .row(i)
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if Some(j) == pc {
                    if d.protected()[i] == 1 { "privileged" } else { "unprivileged" }.to_string()
                } else {
                    v.to_string()
                }
            })
            .collect();
        rec.push(d.labels()[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
