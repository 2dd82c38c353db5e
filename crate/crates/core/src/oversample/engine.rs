use log::warn;
use rand::seq::index;
use rand::Rng;

use super::{interpolate, OversampleConfig, OversampleError, SynthesisKind, SynthesisRecord};
use crate::data::{AppendedRow, Cell, Dataset, Origin, SubgroupPartition};
use crate::neighbors::{knn_table, Geometry};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum BaseDraw {
    /// Independent uniform draws.
    WithReplacement,
    /// Distinct bases when the count fits in the pool, uniform draws otherwise.
    DistinctIfPossible,
}

/// One batch of synthetic rows: bases drawn from `bases`, neighbors from
/// `pool` (which must contain every base).
pub(super) struct Batch<'a> {
    pub bases: &'a [usize],
    pub pool: &'a [usize],
    pub count: usize,
    pub draw: BaseDraw,
    pub kind: SynthesisKind,
    pub seed: u64,
}

pub(super) fn cell_of(p: &SubgroupPartition, d: &Dataset, row: usize) -> Cell {
    let minority = d.labels()[row] == p.minority_label;
    match (minority, d.protected()[row] == 1) {
        (false, true) => Cell::PrivilegedMajority,
        (false, false) => Cell::UnprivilegedMajority,
        (true, true) => Cell::PrivilegedMinority,
        (true, false) => Cell::UnprivilegedMinority,
    }
}

fn interpolation_mask(d: &Dataset, cfg: &OversampleConfig) -> Vec<bool> {
    let mut mask: Vec<bool> = d.columns().iter().map(|c| c.kind.is_continuous()).collect();
    if let Some(pc) = d.protected_column() {
        mask[pc] = cfg.interpolate_protected;
    }
    mask
}

pub(super) fn synthesize(
    d: &Dataset,
    p: &SubgroupPartition,
    batch: &Batch<'_>,
    cfg: &OversampleConfig,
    warnings: &mut Vec<String>,
) -> Result<Vec<SynthesisRecord>, OversampleError> {
    if batch.count == 0 {
        return Ok(Vec::new());
    }
    let mut rng = seed::rng(batch.seed);
    let bases: Vec<usize> = match batch.draw {
        BaseDraw::DistinctIfPossible if batch.count <= batch.bases.len() => {
            let mut picked = index::sample(&mut rng, batch.bases.len(), batch.count).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| batch.bases[i]).collect()
        }
        _ => (0..batch.count).map(|_| batch.bases[rng.random_range(0..batch.bases.len())]).collect(),
    };

    let available = batch.pool.len().saturating_sub(1);
    let k = cfg.k.min(available);
    let mut kind = batch.kind;
    if k == 0 {
        let msg = format!(
            "{:?}: neighbor pool of {} row(s) has no candidates; duplicating bases instead",
            batch.kind,
            batch.pool.len()
        );
        warn!("{msg}");
        warnings.push(msg);
        kind = SynthesisKind::Duplicate;
    } else if k < cfg.k {
        let msg = format!("{:?}: only {available} neighbor candidates, using k = {k}", batch.kind);
        warn!("{msg}");
        warnings.push(msg);
    }

    // Draw every random choice up front, so parallel row construction below
    // cannot perturb the stream.
    let picks: Vec<(usize, f64)> = bases
        .iter()
        .map(|_| if k == 0 { (0, 0.0) } else { (rng.random_range(0..k), rng.random::<f64>()) })
        .collect();

    let mut distinct = bases.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let table = if k == 0 {
        Vec::new()
    } else {
        let geometry = Geometry::for_dataset(d, cfg.include_protected_in_distance);
        knn_table(d, &distinct, batch.pool, k, &geometry, cfg.execution)?
    };

    let mask = interpolation_mask(d, cfg);
    let protected_col = d.protected_column();
    let records = cfg.execution.map_range(bases.len(), |s| {
        let base = bases[s];
        let (pick, gap) = picks[s];
        let neighbor = if k == 0 {
            base
        } else {
            let slot = distinct.binary_search(&base).expect("base has a neighbor list");
            table[slot][pick]
        };
        let row = if kind == SynthesisKind::Duplicate {
            d.row(base).to_vec()
        } else {
            interpolate(d.row(base), d.row(neighbor), gap, &mask)
        };
        let assigned_protected = match protected_col {
            Some(pc) if cfg.interpolate_protected => u8::from(row[pc] >= 0.5),
            _ => d.protected()[base],
        };
        SynthesisRecord {
            base_index: base,
            neighbor_index: neighbor,
            gap,
            row,
            assigned_label: p.minority_label,
            assigned_protected,
            cell: cell_of(p, d, base),
            kind,
        }
    });
    Ok(records)
}

pub(super) fn append_records(d: &Dataset, records: &[SynthesisRecord]) -> Dataset {
    let origins = d.origins();
    d.append_rows(
        records
            .iter()
            .map(|r| AppendedRow {
                values: r.row.clone(),
                label: r.assigned_label,
                protected: r.assigned_protected,
                origin: Origin::combine(&origins[r.base_index], &origins[r.neighbor_index]),
            })
            .collect(),
    )
}
