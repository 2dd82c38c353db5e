use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{partition_subgroups, DataError, Dataset};
use crate::seed;

/// Disjoint validation folds covering every row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub folds: Vec<Vec<usize>>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn validation(&self, fold: usize) -> &[usize] {
        &self.folds[fold]
    }

    /// Every row outside `fold`, ascending.
    pub fn training(&self, fold: usize) -> Vec<usize> {
        let mut rows: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|&(f, _)| f != fold)
            .flat_map(|(_, rows)| rows.iter().copied())
            .collect();
        rows.sort_unstable();
        rows
    }
}

/// Stratified k-fold assignment.
///
/// Rows are grouped by (label, protected), each group shuffled, and the
/// concatenation dealt round-robin. Because each class (and each cell) is a
/// contiguous run of the dealt sequence, every fold receives the floor or the
/// ceiling of its proportional share of every class and cell.
///
/// A class may have fewer than `k` members; it is rejected only when some
/// training portion would lose it entirely (fewer than two members).
pub fn stratified_kfold(d: &Dataset, k: usize, seed: u64) -> Result<FoldPlan, DataError> {
    if k < 2 {
        return Err(DataError::Invalid(format!("k-fold needs k >= 2, got {k}")));
    }
    for label in 0..=1u8 {
        let count = d.labels().iter().filter(|&&y| y == label).count();
        if count == 1 {
            return Err(DataError::Stratification { label, count, k });
        }
    }
    let mut rng = seed::rng(seed::derive(seed, &[seed::tag::FOLDS]));
    let mut order = Vec::with_capacity(d.n_rows());
    for label in 0..=1u8 {
        for group in 0..=1u8 {
            let mut cell: Vec<usize> = (0..d.n_rows())
                .filter(|&i| d.labels()[i] == label && d.protected()[i] == group)
                .collect();
            cell.shuffle(&mut rng);
            order.extend(cell);
        }
    }
    let mut folds = vec![Vec::new(); k];
    for (pos, row) in order.into_iter().enumerate() {
        folds[pos % k].push(row);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(FoldPlan { k, folds, seed })
}

/// Which cells the imbalance-level downsampler shrinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalMode {
    /// Only the unprivileged-minority cell.
    #[default]
    MinorityCell,
    /// Both unprivileged cells (minority and majority) by the same level.
    UnprivilegedGroup,
}

/// Shrink the unprivileged-minority cell (and, in
/// [`RemovalMode::UnprivilegedGroup`], the unprivileged-majority cell) to
/// `floor(count / level)` rows, removing uniformly at random. Remaining rows
/// keep their relative order. For a fixed seed the kept set at a higher
/// level is a subset of the kept set at a lower one.
pub fn downsample_to_level(
    d: &Dataset,
    level: f64,
    seed: u64,
    mode: RemovalMode,
) -> Result<Dataset, DataError> {
    if !(level.is_finite() && level >= 1.0) {
        return Err(DataError::InvalidLevel(level));
    }
    if level == 1.0 {
        return Ok(d.clone());
    }
    let p = partition_subgroups(d);
    let mut rng = seed::rng(seed::derive(seed, &[seed::tag::DOWNSAMPLE]));
    let mut targets = vec![&p.upmin];
    if mode == RemovalMode::UnprivilegedGroup {
        targets.push(&p.upmaj);
    }
    let mut removed = vec![false; d.n_rows()];
    for cell in targets {
        let keep = (cell.len() as f64 / level).floor() as usize;
        if keep == 0 {
            return Err(DataError::DegenerateDownsample { count: cell.len(), level });
        }
        let mut shuffled = cell.clone();
        shuffled.shuffle(&mut rng);
        for &i in &shuffled[keep..] {
            removed[i] = true;
        }
    }
    let kept: Vec<usize> = (0..d.n_rows()).filter(|&i| !removed[i]).collect();
    Ok(d.subset(&kept))
}
