use rand::Rng;

use super::engine::{append_records, cell_of};
use super::{OversampleError, Outcome, SynthesisKind, SynthesisRecord};
use crate::data::{partition_subgroups, Dataset};
use crate::seed;

/// Duplicate uniformly drawn minority rows until the classes are equal.
pub fn random_oversample(d: &Dataset, seed: u64) -> Result<Outcome, OversampleError> {
    let p = partition_subgroups(d);
    let counts = p.counts();
    let deficit = counts.majority() - counts.minority();
    if deficit == 0 {
        return Ok(Outcome::unchanged(d));
    }
    let minority = p.minority_rows();
    if minority.is_empty() {
        return Err(OversampleError::EmptyMinority);
    }
    let mut rng = seed::rng(seed::derive(seed, &[seed::tag::PHASE_ONE]));
    let records: Vec<SynthesisRecord> = (0..deficit)
        .map(|_| {
            let base = minority[rng.random_range(0..minority.len())];
            SynthesisRecord {
                base_index: base,
                neighbor_index: base,
                gap: 0.0,
                row: d.row(base).to_vec(),
                assigned_label: p.minority_label,
                assigned_protected: d.protected()[base],
                cell: cell_of(&p, d, base),
                kind: SynthesisKind::Duplicate,
            }
        })
        .collect();
    Ok(Outcome { dataset: append_records(d, &records), records, warnings: Vec::new(), plan: None })
}
