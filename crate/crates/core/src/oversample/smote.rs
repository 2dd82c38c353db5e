use super::engine::{append_records, synthesize, Batch, BaseDraw};
use super::{OversampleConfig, OversampleError, Outcome, SynthesisKind};
use crate::data::{partition_subgroups, Dataset};
use crate::seed;

/// SMOTE: grow the minority class to the majority count by interpolating
/// each random minority base toward one of its `k` nearest minority
/// neighbors. The protected value is taken from the base.
pub fn smote(d: &Dataset, cfg: &OversampleConfig, seed: u64) -> Result<Outcome, OversampleError> {
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
    let mut warnings = Vec::new();
    let batch = Batch {
        bases: &minority,
        pool: &minority,
        count: deficit,
        draw: BaseDraw::WithReplacement,
        kind: SynthesisKind::Smote,
        seed: seed::derive(seed, &[seed::tag::PHASE_ONE]),
    };
    let records = synthesize(d, &p, &batch, cfg, &mut warnings)?;
    Ok(Outcome { dataset: append_records(d, &records), records, warnings, plan: None })
}
