use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use super::DataError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnKind {
    Continuous,
    Binary,
    /// One indicator column of a one-hot encoded categorical; `group` is the
    /// source column name.
    OneHot { group: String },
}

impl ColumnKind {
    pub fn is_continuous(&self) -> bool {
        matches!(self, ColumnKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: String,
    #[serde(flatten)]
    pub kind: ColumnKind,
}

impl ColumnMeta {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        Self { name: name.into(), kind }
    }

    pub fn continuous(name: impl Into<String>) -> Self {
        Self::new(name, ColumnKind::Continuous)
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self::new(name, ColumnKind::Binary)
    }

    /// Name used when aggregating importances: the one-hot group for
    /// indicator columns, the column name otherwise.
    pub fn group_name(&self) -> &str {
        match &self.kind {
            ColumnKind::OneHot { group } => group,
            _ => &self.name,
        }
    }
}

/// Where a row came from, in terms of ingestion ids of original rows.
///
/// Synthetic rows carry the union of their base's and neighbor's sources so
/// that leakage audits can be done on any derived dataset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Origin {
    Original(u32),
    Derived(Box<[u32]>),
}

impl Origin {
    pub fn sources(&self) -> &[u32] {
        match self {
            Origin::Original(id) => std::slice::from_ref(id),
            Origin::Derived(ids) => ids,
        }
    }

    pub fn is_original(&self) -> bool {
        matches!(self, Origin::Original(_))
    }

    pub fn combine(a: &Origin, b: &Origin) -> Origin {
        let mut ids: Vec<u32> = a.sources().iter().chain(b.sources()).copied().collect();
        ids.sort_unstable();
        ids.dedup();
        Origin::Derived(ids.into_boxed_slice())
    }
}

/// A binary-labelled tabular dataset with one binary protected attribute.
///
/// Labels use 1 for the positive (favorable) outcome; `protected` uses 1 for
/// the privileged group. The protected attribute may also appear as a
/// feature column (it does after CSV ingestion), in which case
/// `protected_column` points at it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<u8>,
    protected: Vec<u8>,
    weights: Option<Vec<f64>>,
    columns: Vec<ColumnMeta>,
    protected_column: Option<usize>,
    origins: Vec<Origin>,
}

impl Dataset {
    /// Build a dataset, checking every invariant. Rows get ingestion ids
    /// `0..n` in order.
    pub fn new(
        features: Array2<f64>,
        labels: Vec<u8>,
        protected: Vec<u8>,
        columns: Vec<ColumnMeta>,
        protected_column: Option<usize>,
    ) -> Result<Self, DataError> {
        let (n, d) = features.dim();
        if n == 0 {
            return Err(DataError::Empty);
        }
        if d == 0 {
            return Err(DataError::Invalid("dataset has no feature columns".into()));
        }
        if labels.len() != n || protected.len() != n {
            return Err(DataError::Invalid(format!(
                "length mismatch: {n} feature rows, {} labels, {} protected values",
                labels.len(),
                protected.len()
            )));
        }
        if columns.len() != d {
            return Err(DataError::Invalid(format!(
                "{} column descriptors for {d} feature columns",
                columns.len()
            )));
        }
        if let Some(c) = protected_column {
            if c >= d {
                return Err(DataError::Invalid(format!("protected column {c} out of range")));
            }
        }
        if let Some(bad) = features.iter().position(|v| !v.is_finite()) {
            return Err(DataError::Invalid(format!(
                "non-finite feature at row {}, column {}",
                bad / d,
                bad % d
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(DataError::Invalid(format!("label at row {i} is not 0/1")));
        }
        if let Some(i) = protected.iter().position(|&g| g > 1) {
            return Err(DataError::Invalid(format!("protected value at row {i} is not 0/1")));
        }
        let origins = (0..n as u32).map(Origin::Original).collect();
        Ok(Self { features, labels, protected, weights: None, columns, protected_column, origins })
    }

    /// Attach per-instance weights; each must be finite and strictly positive.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self, DataError> {
        if weights.len() != self.n_rows() {
            return Err(DataError::Invalid(format!(
                "{} weights for {} rows",
                weights.len(),
                self.n_rows()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(DataError::Invalid(format!("weight at row {i} is not positive and finite")));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn without_weights(mut self) -> Self {
        self.weights = None;
        self
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn protected(&self) -> &[u8] {
        &self.protected
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Weight of row `i`, 1.0 when the dataset is unweighted.
    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    pub fn columns(&self) -> &[ColumnMeta] {
        &self.columns
    }

    pub fn protected_column(&self) -> Option<usize> {
        self.protected_column
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }

    /// Indices of columns whose kind is continuous.
    pub fn continuous_columns(&self) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind.is_continuous())
            .map(|(i, _)| i)
            .collect()
    }

    /// Rows at `indices`, in that order, keeping their origins.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            protected: indices.iter().map(|&i| self.protected[i]).collect(),
            weights: self.weights.as_ref().map(|w| indices.iter().map(|&i| w[i]).collect()),
            columns: self.columns.clone(),
            protected_column: self.protected_column,
            origins: indices.iter().map(|&i| self.origins[i].clone()).collect(),
        }
    }

    /// Same rows with the feature matrix replaced (used by scaling).
    pub(crate) fn with_features(&self, features: Array2<f64>) -> Dataset {
        debug_assert_eq!(features.dim(), self.features.dim());
        Dataset { features, ..self.clone() }
    }

    /// Copy of the dataset with one feature column removed.
    pub fn drop_column(&self, col: usize) -> Dataset {
        let keep: Vec<usize> = (0..self.n_features()).filter(|&c| c != col).collect();
        let protected_column = match self.protected_column {
            Some(p) if p == col => None,
            Some(p) if p > col => Some(p - 1),
            other => other,
        };
        Dataset {
            features: self.features.select(Axis(1), &keep),
            columns: keep.iter().map(|&c| self.columns[c].clone()).collect(),
            protected_column,
            ..self.clone()
        }
    }

    /// Append rows after the existing ones. Appended rows get weight 1.0
    /// when the dataset is weighted.
    pub(crate) fn append_rows(&self, rows: Vec<AppendedRow>) -> Dataset {
        if rows.is_empty() {
            return self.clone();
        }
        let d = self.n_features();
        let n = self.n_rows();
        let mut flat = Vec::with_capacity((n + rows.len()) * d);
        flat.extend(self.features.iter().copied());
        let mut labels = self.labels.clone();
        let mut protected = self.protected.clone();
        let mut origins = self.origins.clone();
        let mut weights = self.weights.clone();
        for row in rows {
            assert_eq!(row.values.len(), d, "appended row arity");
            flat.extend_from_slice(&row.values);
            labels.push(row.label);
            protected.push(row.protected);
            origins.push(row.origin);
            if let Some(w) = weights.as_mut() {
                w.push(1.0);
            }
        }
        let total = labels.len();
        Dataset {
            features: Array2::from_shape_vec((total, d), flat).expect("row-major shape"),
            labels,
            protected,
            weights,
            columns: self.columns.clone(),
            protected_column: self.protected_column,
            origins,
        }
    }
}

pub(crate) struct AppendedRow {
    pub values: Vec<f64>,
    pub label: u8,
    pub protected: u8,
    pub origin: Origin,
}
