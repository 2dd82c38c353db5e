use log::warn;
use serde::{Deserialize, Serialize};

use super::engine::{append_records, synthesize, Batch, BaseDraw};
use super::{OversampleConfig, OversampleError, Outcome, SynthesisKind};
use crate::data::{partition_subgroups, Cell, CellCounts, Dataset};
use crate::seed;

/// How many rows each minority cell needs, and in which order they are made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FosPlan {
    /// `N_prmaj - N_prmin`, clamped at zero.
    pub s_pr: usize,
    /// `N_upmaj - N_upmin`, clamped at zero.
    pub s_up: usize,
    /// Cell with the smaller deficit; oversampled first, neighbors from
    /// within the cell.
    pub d1: Cell,
    /// The other minority cell; neighbors from the whole minority class.
    pub d2: Cell,
    pub n_samp1: usize,
    pub n_samp2: usize,
}

impl FosPlan {
    /// Plan from cell counts. A minority cell larger than its majority
    /// counterpart gets a zero deficit and a warning.
    pub fn from_counts(c: CellCounts) -> (FosPlan, Vec<String>) {
        let mut warnings = Vec::new();
        let mut deficit = |maj: usize, min: usize, name: &str| {
            maj.checked_sub(min).unwrap_or_else(|| {
                warnings.push(format!(
                    "{name} minority cell ({min}) exceeds its majority cell ({maj}); deficit clamped to 0"
                ));
                0
            })
        };
        let s_pr = deficit(c.prmaj, c.prmin, "privileged");
        let s_up = deficit(c.upmaj, c.upmin, "unprivileged");
        // strict comparison: a tie takes the privileged cell first
        let plan = if s_up < s_pr {
            FosPlan {
                s_pr,
                s_up,
                d1: Cell::UnprivilegedMinority,
                d2: Cell::PrivilegedMinority,
                n_samp1: s_up,
                n_samp2: s_pr,
            }
        } else {
            FosPlan {
                s_pr,
                s_up,
                d1: Cell::PrivilegedMinority,
                d2: Cell::UnprivilegedMinority,
                n_samp1: s_pr,
                n_samp2: s_up,
            }
        };
        (plan, warnings)
    }

    /// Cell counts after the plan is carried out.
    pub fn apply_to(&self, c: CellCounts) -> CellCounts {
        CellCounts { prmin: c.prmin + self.s_pr, upmin: c.upmin + self.s_up, ..c }
    }
}

/// Fair Oversampling.
///
/// Phase one oversamples the minority cell with the smaller deficit using
/// neighbors from that cell only. Phase two oversamples the other minority
/// cell using neighbors from the entire (original) minority class. Afterwards
/// each minority cell matches its majority counterpart in size, so the
/// classes are balanced as well. Synthetic rows carry the minority label and
/// their base's protected value.
pub fn fos(d: &Dataset, cfg: &OversampleConfig, seed: u64) -> Result<Outcome, OversampleError> {
    let p = partition_subgroups(d);
    let (plan, mut warnings) = FosPlan::from_counts(p.counts());
    for w in &warnings {
        warn!("{w}");
    }
    for (cell, need) in [(plan.d1, plan.n_samp1), (plan.d2, plan.n_samp2)] {
        if need > 0 && p.cell(cell).is_empty() {
            return Err(OversampleError::EmptyCell(cell));
        }
    }
    let minority = p.minority_rows();
    let phase_one = Batch {
        bases: p.cell(plan.d1),
        pool: p.cell(plan.d1),
        count: plan.n_samp1,
        draw: BaseDraw::DistinctIfPossible,
        kind: SynthesisKind::WithinCell,
        seed: seed::derive(seed, &[seed::tag::PHASE_ONE]),
    };
    let phase_two = Batch {
        bases: p.cell(plan.d2),
        pool: &minority,
        count: plan.n_samp2,
        draw: BaseDraw::DistinctIfPossible,
        kind: SynthesisKind::WholeMinority,
        seed: seed::derive(seed, &[seed::tag::PHASE_TWO]),
    };
    let mut records = synthesize(d, &p, &phase_one, cfg, &mut warnings)?;
    records.extend(synthesize(d, &p, &phase_two, cfg, &mut warnings)?);
    Ok(Outcome { dataset: append_records(d, &records), records, warnings, plan: Some(plan) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ColumnMeta;
    use ndarray::Array2;
    use rand::Rng;

    /// Minority label 1; a continuous feature, a one-hot pair and the
    /// protected indicator.
    pub(crate) fn cells_fixture(c: CellCounts, seed: u64) -> Dataset {
        let mut rng = crate::seed::rng(seed);
        let mut labels = Vec::new();
        let mut protected = Vec::new();
        for (n, y, g) in [(c.prmaj, 0, 1), (c.upmaj, 0, 0), (c.prmin, 1, 1), (c.upmin, 1, 0)] {
            labels.extend(std::iter::repeat_n(y, n));
            protected.extend(std::iter::repeat_n(g, n));
        }
        let n = labels.len();
        let mut x = Array2::zeros((n, 4));
        for i in 0..n {
            x[[i, 0]] = rng.random::<f64>() * 4.0 - 2.0 + f64::from(labels[i]);
            let hot = rng.random_range(0..2);
            x[[i, 1 + hot]] = 1.0;
            x[[i, 3]] = f64::from(protected[i]);
        }
        let cols = vec![
            ColumnMeta::continuous("x"),
            ColumnMeta::new("c=a", crate::data::ColumnKind::OneHot { group: "c".into() }),
            ColumnMeta::new("c=b", crate::data::ColumnKind::OneHot { group: "c".into() }),
            ColumnMeta::binary("g"),
        ];
        Dataset::new(x, labels, protected, cols, Some(3)).unwrap()
    }

    #[test]
    fn german_plan() {
        let (plan, warnings) = FosPlan::from_counts(CellCounts::new(499, 201, 191, 109));
        assert!(warnings.is_empty());
        assert_eq!((plan.s_pr, plan.s_up), (308, 92));
        assert_eq!(plan.d1, Cell::UnprivilegedMinority);
        assert_eq!(plan.d2, Cell::PrivilegedMinority);
        assert_eq!((plan.n_samp1, plan.n_samp2), (92, 308));
        assert_eq!(
            plan.apply_to(CellCounts::new(499, 201, 191, 109)),
            CellCounts::new(499, 201, 499, 201)
        );
    }

    #[test]
    fn adult_plan() {
        let (plan, _) = FosPlan::from_counts(CellCounts::new(22732, 14423, 9918, 1769));
        assert_eq!((plan.s_pr, plan.s_up), (12814, 12654));
        assert_eq!(plan.d1, Cell::UnprivilegedMinority);
    }

    #[test]
    fn tie_and_clamp() {
        let (plan, _) = FosPlan::from_counts(CellCounts::new(10, 8, 4, 2));
        assert_eq!(plan.d1, Cell::PrivilegedMinority);
        let (plan, warnings) = FosPlan::from_counts(CellCounts::new(10, 3, 4, 5));
        assert_eq!((plan.s_pr, plan.s_up), (6, 0));
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn balances_cells_on_fixture() {
        let d = cells_fixture(CellCounts::new(40, 25, 12, 5), 3);
        let out = fos(&d, &OversampleConfig::default(), 11).unwrap();
        let after = partition_subgroups(&out.dataset).counts();
        assert_eq!(after, CellCounts::new(40, 25, 40, 25));
        assert_eq!(out.dataset.subset(&(0..d.n_rows()).collect::<Vec<_>>()), d);
        let p = partition_subgroups(&d);
        for r in &out.records {
            match r.kind {
                SynthesisKind::WithinCell => {
                    assert_eq!(r.cell, Cell::UnprivilegedMinority);
                    assert!(p.upmin.contains(&r.base_index) && p.upmin.contains(&r.neighbor_index));
                }
                SynthesisKind::WholeMinority => {
                    assert!(p.prmin.contains(&r.base_index));
                    assert_eq!(d.labels()[r.neighbor_index], p.minority_label);
                }
                other => panic!("unexpected {other:?}"),
            }
            // one-hot and protected columns come from the base
            assert_eq!(&r.row[1..], &d.row(r.base_index).to_vec()[1..]);
        }
    }

    #[test]
    fn balanced_input_unchanged() {
        let d = cells_fixture(CellCounts::new(6, 6, 6, 6), 1);
        let out = fos(&d, &OversampleConfig::default(), 0).unwrap();
        assert_eq!(out.dataset, d);
    }

    #[test]
    fn tiny_cell_falls_back_to_duplication() {
        let d = cells_fixture(CellCounts::new(20, 4, 3, 1), 2);
        let out = fos(&d, &OversampleConfig::default(), 0).unwrap();
        assert_eq!(partition_subgroups(&out.dataset).counts(), CellCounts::new(20, 4, 20, 4));
        assert!(out.records.iter().any(|r| r.kind == SynthesisKind::Duplicate));
        assert!(!out.warnings.is_empty());
    }

    #[test]
    fn empty_cell_with_deficit_errors() {
        let d = cells_fixture(CellCounts::new(20, 4, 3, 0), 2);
        assert!(matches!(
            fos(&d, &OversampleConfig::default(), 0),
            Err(OversampleError::EmptyCell(Cell::UnprivilegedMinority))
        ));
    }

    #[test]
    fn execution_mode_does_not_change_output() {
        let d = cells_fixture(CellCounts::new(60, 30, 20, 9), 5);
        let seq = OversampleConfig { execution: crate::Execution::Sequential, ..Default::default() };
        let par = OversampleConfig { execution: crate::Execution::Parallel, ..Default::default() };
        assert_eq!(fos(&d, &seq, 8).unwrap().dataset, fos(&d, &par, 8).unwrap().dataset);
    }
}
