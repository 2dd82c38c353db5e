use serde::{Deserialize, Serialize};

use super::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub column: usize,
    pub mean: f64,
    /// Population standard deviation; 0 marks a constant column.
    pub std: f64,
}

/// Per-column z-score parameters fitted on a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub columns: Vec<ColumnScale>,
}

/// Fit on the given columns (typically `d.continuous_columns()`).
pub fn standardize_fit(d: &Dataset, columns: &[usize]) -> ScalerParams {
    let n = d.n_rows() as f64;
    let x = d.features();
    let columns = columns
        .iter()
        .map(|&c| {
            let col = x.column(c);
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            ColumnScale { column: c, mean, std: var.sqrt() }
        })
        .collect();
    ScalerParams { columns }
}

/// Apply fitted parameters. Constant columns map to 0; other columns are
/// left untouched.
pub fn standardize_apply(d: &Dataset, params: &ScalerParams) -> Dataset {
    let mut x = d.features().clone();
    for s in &params.columns {
        let mut col = x.column_mut(s.column);
        if s.std > 0.0 {
            col.mapv_inplace(|v| (v - s.mean) / s.std);
        } else {
            col.fill(0.0);
        }
    }
    d.with_features(x)
}
