//! Exact k-nearest-neighbor search over row subsets of a [`Dataset`].
//!
//! Brute force: every candidate distance is computed. Results are ordered by
//! (squared Euclidean distance, row index), so they do not depend on the
//! order of the pool.

use std::cmp::Ordering;

use thiserror::Error;

use crate::data::Dataset;
use crate::exec::Execution;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NeighborError {
    #[error("neighbor pool has {available} candidates besides the query, need k = {k}")]
    PoolTooSmall { available: usize, k: usize },
    #[error("k must be at least 1")]
    ZeroK,
}

/// Feature columns that take part in distance computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geometry {
    columns: Vec<usize>,
}

impl Geometry {
    /// Every feature column.
    pub fn all(d: &Dataset) -> Self {
        Self { columns: (0..d.n_features()).collect() }
    }

    /// Every feature column, optionally leaving out the protected attribute.
    pub fn for_dataset(d: &Dataset, include_protected: bool) -> Self {
        let skip = if include_protected { None } else { d.protected_column() };
        Self { columns: (0..d.n_features()).filter(|&c| Some(c) != skip).collect() }
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn squared_distance(&self, d: &Dataset, a: usize, b: usize) -> f64 {
        let (ra, rb) = (d.row(a), d.row(b));
        self.columns.iter().map(|&c| (ra[c] - rb[c]).powi(2)).sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NeighborQuery<'a> {
    pub pool: &'a [usize],
    /// Excluded from its own result even when present in `pool`.
    pub query: usize,
    pub k: usize,
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// The `k` nearest pool rows to `q.query`, nearest first.
pub fn knn(d: &Dataset, q: &NeighborQuery<'_>, geometry: &Geometry) -> Result<Vec<usize>, NeighborError> {
    if q.k == 0 {
        return Err(NeighborError::ZeroK);
    }
    let mut candidates: Vec<(f64, usize)> = q
        .pool
        .iter()
        .filter(|&&i| i != q.query)
        .map(|&i| (geometry.squared_distance(d, q.query, i), i))
        .collect();
    if candidates.len() < q.k {
        return Err(NeighborError::PoolTooSmall { available: candidates.len(), k: q.k });
    }
    if candidates.len() > q.k {
        candidates.select_nth_unstable_by(q.k - 1, by_distance_then_index);
        candidates.truncate(q.k);
    }
    candidates.sort_unstable_by(by_distance_then_index);
    Ok(candidates.into_iter().map(|(_, i)| i).collect())
}

/// Neighbor lists for many queries against one pool.
pub fn knn_table(
    d: &Dataset,
    queries: &[usize],
    pool: &[usize],
    k: usize,
    geometry: &Geometry,
    exec: Execution,
) -> Result<Vec<Vec<usize>>, NeighborError> {
    exec.map_slice(queries, |&query| knn(d, &NeighborQuery { pool, query, k }, geometry))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ColumnMeta;
    use ndarray::Array2;

    fn line(points: &[f64]) -> Dataset {
        let x = Array2::from_shape_vec((points.len(), 1), points.to_vec()).unwrap();
        let n = points.len();
        Dataset::new(x, vec![0; n], vec![0; n], vec![ColumnMeta::continuous("x")], None).unwrap()
    }

    #[test]
    fn hand_distance_table() {
        let d = line(&[0.0, 1.0, 3.0, 7.0]);
        let g = Geometry::all(&d);
        let pool = [0, 1, 2, 3];
        assert_eq!(knn(&d, &NeighborQuery { pool: &pool, query: 0, k: 2 }, &g).unwrap(), vec![1, 2]);
        assert_eq!(knn(&d, &NeighborQuery { pool: &pool, query: 3, k: 3 }, &g).unwrap(), vec![2, 1, 0]);
    }

    #[test]
    fn duplicate_point_ranks_first() {
        let d = line(&[2.0, 5.0, 2.0, 2.5]);
        let g = Geometry::all(&d);
        let pool = [1, 3, 2, 0];
        assert_eq!(knn(&d, &NeighborQuery { pool: &pool, query: 0, k: 2 }, &g).unwrap(), vec![2, 3]);
    }

    #[test]
    fn ties_break_on_row_index() {
        let d = line(&[0.0, -1.0, 1.0, 2.0, -2.0]);
        let g = Geometry::all(&d);
        let a = knn(&d, &NeighborQuery { pool: &[4, 3, 2, 1], query: 0, k: 3 }, &g).unwrap();
        let b = knn(&d, &NeighborQuery { pool: &[1, 2, 3, 4], query: 0, k: 3 }, &g).unwrap();
        assert_eq!(a, vec![1, 2, 3]);
        assert_eq!(a, b);
    }

    #[test]
    fn pool_too_small() {
        let d = line(&[0.0, 1.0]);
        let g = Geometry::all(&d);
        assert_eq!(
            knn(&d, &NeighborQuery { pool: &[0, 1], query: 0, k: 2 }, &g),
            Err(NeighborError::PoolTooSmall { available: 1, k: 2 })
        );
        assert_eq!(knn(&d, &NeighborQuery { pool: &[0, 1], query: 0, k: 0 }, &g), Err(NeighborError::ZeroK));
    }

    #[test]
    fn protected_column_excluded_from_geometry() {
        let x = Array2::from_shape_vec((3, 2), vec![0.0, 1.0, 1.0, 1.0, 0.5, 0.0]).unwrap();
        let d = Dataset::new(
            x,
            vec![0; 3],
            vec![1, 1, 0],
            vec![ColumnMeta::continuous("x"), ColumnMeta::binary("g")],
            Some(1),
        )
        .unwrap();
        let pool = [0, 1, 2];
        let q = NeighborQuery { pool: &pool, query: 0, k: 1 };
        assert_eq!(knn(&d, &q, &Geometry::for_dataset(&d, false)).unwrap(), vec![2]);
        assert_eq!(knn(&d, &q, &Geometry::for_dataset(&d, true)).unwrap(), vec![1]);
    }
}
