use serde::{Deserialize, Serialize};

use super::OversampleError;
use crate::data::{partition_subgroups, Cell, CellCounts, Dataset};

/// Per-cell instance weights: expected over observed cell frequency,
/// `N_group * N_class / (n * N_cell)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellWeights {
    pub prmaj: f64,
    pub upmaj: f64,
    pub prmin: f64,
    pub upmin: f64,
}

impl CellWeights {
    pub fn get(&self, cell: Cell) -> f64 {
        match cell {
            Cell::PrivilegedMajority => self.prmaj,
            Cell::UnprivilegedMajority => self.upmaj,
            Cell::PrivilegedMinority => self.prmin,
            Cell::UnprivilegedMinority => self.upmin,
        }
    }
}

pub fn cell_weights(c: CellCounts) -> Result<CellWeights, OversampleError> {
    if let Some(empty) = Cell::ALL.into_iter().find(|&cell| c.get(cell) == 0) {
        return Err(OversampleError::EmptyCell(empty));
    }
    let n = c.total() as f64;
    let w = |group: usize, class: usize, cell: usize| (group as f64 * class as f64) / (n * cell as f64);
    Ok(CellWeights {
        prmaj: w(c.privileged(), c.majority(), c.prmaj),
        upmaj: w(c.unprivileged(), c.majority(), c.upmaj),
        prmin: w(c.privileged(), c.minority(), c.prmin),
        upmin: w(c.unprivileged(), c.minority(), c.upmin),
    })
}

/// Attach Reweighing weights; features and labels are unchanged. Any
/// existing weights are replaced.
pub fn reweigh(d: &Dataset) -> Result<Dataset, OversampleError> {
    let p = partition_subgroups(d);
    let cw = cell_weights(p.counts())?;
    let mut weights = vec![0.0; d.n_rows()];
    for cell in Cell::ALL {
        for &i in p.cell(cell) {
            weights[i] = cw.get(cell);
        }
    }
    Ok(d.clone().with_weights(weights).expect("cell weights are positive and finite"))
}
