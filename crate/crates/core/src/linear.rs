//! Instance-weight-aware linear classifiers trained by full-batch gradient
//! descent, and coefficient-based feature importance.
//!
//! The objective is the weighted mean loss plus an L2 penalty on the
//! coefficients (not the bias):
//!
//! ```text
//! J(w, b) = sum_i c_i * loss(y_i, w.x_i + b) / sum_i c_i  +  l2/2 * |w|^2
//! ```
//!
//! Normalizing by the total instance weight makes the objective invariant to
//! rescaling all instance weights.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{ColumnMeta, Dataset};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("training set contains a single class")]
    SingleClass,
    #[error("feature arity mismatch: model has {expected} weights, input has {got} columns")]
    ArityMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Logistic,
    /// Quadratically smoothed hinge (linear SVM).
    Hinge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyper {
    pub learning_rate: f64,
    pub l2: f64,
    pub epochs: usize,
    /// Recorded for provenance; training starts from zero and is
    /// deterministic regardless.
    pub seed: u64,
}

impl Default for Hyper {
    fn default() -> Self {
        Self { learning_rate: 0.1, l2: 1e-3, epochs: 500, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: LossKind,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyper: Hyper,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Per-instance loss and its derivative with respect to the score.
fn loss_and_slope(kind: LossKind, y: u8, score: f64) -> (f64, f64) {
    match kind {
        LossKind::Logistic => {
            let y = f64::from(y);
            (softplus(score) - y * score, sigmoid(score) - y)
        }
        LossKind::Hinge => {
            let sign = if y == 1 { 1.0 } else { -1.0 };
            let m = sign * score;
            if m >= 1.0 {
                (0.0, 0.0)
            } else if m > 0.0 {
                (0.5 * (1.0 - m).powi(2), -sign * (1.0 - m))
            } else {
                (0.5 - m, -sign)
            }
        }
    }
}

/// Objective value and gradient at `params = [w_1..w_d, b]`.
pub fn objective(
    kind: LossKind,
    x: ArrayView2<'_, f64>,
    y: &[u8],
    instance_weights: Option<&[f64]>,
    params: &[f64],
    l2: f64,
) -> (f64, Vec<f64>) {
    let d = x.ncols();
    assert_eq!(params.len(), d + 1, "params = weights + bias");
    let w = ArrayView1::from(&params[..d]);
    let b = params[d];
    let scores = x.dot(&w) + b;
    let total_weight: f64 = instance_weights.map_or(y.len() as f64, |c| c.iter().sum());
    let mut loss = 0.0;
    let mut slopes = Array1::zeros(y.len());
    for (i, &s) in scores.iter().enumerate() {
        let c = instance_weights.map_or(1.0, |cw| cw[i]) / total_weight;
        let (l, g) = loss_and_slope(kind, y[i], s);
        loss += c * l;
        slopes[i] = c * g;
    }
    let mut grad = x.t().dot(&slopes);
    grad.zip_mut_with(&w, |g, &wj| *g += l2 * wj);
    loss += 0.5 * l2 * w.dot(&w);
    let mut out = grad.to_vec();
    out.push(slopes.sum());
    (loss, out)
}

/// Train and also return the objective after each epoch (entry 0 is the
/// starting objective).
pub fn train_with_history(d: &Dataset, kind: LossKind, hyper: &Hyper) -> Result<(LinearModel, Vec<f64>), ModelError> {
    let has = |label| d.labels().contains(&label);
    if !(has(0) && has(1)) {
        return Err(ModelError::SingleClass);
    }
    let x = d.features().view();
    let y = d.labels();
    let cw = d.weights();
    let mut params = vec![0.0; d.n_features() + 1];
    let (mut loss, mut grad) = objective(kind, x, y, cw, &params, hyper.l2);
    let mut history = Vec::with_capacity(hyper.epochs + 1);
    history.push(loss);
    'epochs: for _ in 0..hyper.epochs {
        let mut step = hyper.learning_rate;
        // Halve the step until the objective does not increase.
        for _ in 0..40 {
            let candidate: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - step * g).collect();
            let (next_loss, next_grad) = objective(kind, x, y, cw, &candidate, hyper.l2);
            if next_loss <= loss {
                params = candidate;
                loss = next_loss;
                grad = next_grad;
                history.push(loss);
                continue 'epochs;
            }
            step *= 0.5;
        }
        break;
    }
    let bias = params.pop().expect("bias slot");
    Ok((LinearModel { kind, weights: params, bias, hyper: *hyper }, history))
}

pub fn train(d: &Dataset, kind: LossKind, hyper: &Hyper) -> Result<LinearModel, ModelError> {
    train_with_history(d, kind, hyper).map(|(m, _)| m)
}

impl LinearModel {
    pub fn score(&self, row: ArrayView1<'_, f64>) -> f64 {
        row.dot(&ArrayView1::from(&self.weights[..])) + self.bias
    }

    /// Label 1 iff the score is non-negative.
    pub fn predict(&self, x: &Array2<f64>) -> Result<Vec<u8>, ModelError> {
        if x.ncols() != self.weights.len() {
            return Err(ModelError::ArityMismatch { expected: self.weights.len(), got: x.ncols() });
        }
        Ok(x.rows().into_iter().map(|r| u8::from(self.score(r) >= 0.0)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    pub name: String,
    pub importance: f64,
}

/// Normalized coefficient magnitudes, with one-hot indicator columns summed
/// under their source column. Sorted by importance, then name.
pub fn feature_importance(m: &LinearModel, columns: &[ColumnMeta]) -> Vec<Importance> {
    assert_eq!(m.weights.len(), columns.len(), "one column descriptor per weight");
    let mut out: Vec<Importance> = Vec::new();
    for (w, col) in m.weights.iter().zip(columns) {
        let name = col.group_name();
        match out.iter_mut().find(|i| i.name == name) {
            Some(entry) => entry.importance += w.abs(),
            None => out.push(Importance { name: name.to_string(), importance: w.abs() }),
        }
    }
    let total: f64 = out.iter().map(|i| i.importance).sum();
    if total > 0.0 {
        for i in &mut out {
            i.importance /= total;
        }
    }
    out.sort_by(|a, b| b.importance.total_cmp(&a.importance).then_with(|| a.name.cmp(&b.name)));
    out
}
