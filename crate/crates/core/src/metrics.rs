//! Per-group confusion accounting and group fairness metrics.
//!
//! Group differences are always privileged minus unprivileged. Rates with a
//! zero denominator are defined as 0 and flagged, never NaN.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("length mismatch: {y_true} labels, {y_pred} predictions, {protected} protected values")]
    LengthMismatch { y_true: usize, y_pred: usize, protected: usize },
    #[error("value at position {0} is not 0/1")]
    NonBinary(usize),
}

/// Binary confusion counts; the positive label is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Confusion {
    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.tn + self.fp
    }

    pub fn total(&self) -> u64 {
        self.positives() + self.negatives()
    }

    fn record(&mut self, truth: u8, pred: u8) {
        match (truth, pred) {
            (1, 1) => self.tp += 1,
            (0, 1) => self.fp += 1,
            (0, 0) => self.tn += 1,
            _ => self.fn_ += 1,
        }
    }

    pub fn rates(&self) -> Rates {
        Rates::from_confusion(self)
    }
}

impl std::ops::Add for Confusion {
    type Output = Confusion;

    fn add(self, o: Confusion) -> Confusion {
        Confusion { tp: self.tp + o.tp, fp: self.fp + o.fp, tn: self.tn + o.tn, fn_: self.fn_ + o.fn_ }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroupConfusion {
    pub privileged: Confusion,
    pub unprivileged: Confusion,
}

impl GroupConfusion {
    pub fn pooled(&self) -> Confusion {
        self.privileged + self.unprivileged
    }

    /// Same counts with the group roles exchanged.
    pub fn swapped(&self) -> GroupConfusion {
        GroupConfusion { privileged: self.unprivileged, unprivileged: self.privileged }
    }
}

pub fn confusion_by_group(y_true: &[u8], y_pred: &[u8], protected: &[u8]) -> Result<GroupConfusion, MetricError> {
    if y_true.len() != y_pred.len() || y_true.len() != protected.len() {
        return Err(MetricError::LengthMismatch {
            y_true: y_true.len(),
            y_pred: y_pred.len(),
            protected: protected.len(),
        });
    }
    let mut c = GroupConfusion::default();
    for (i, ((&t, &p), &g)) in y_true.iter().zip(y_pred).zip(protected).enumerate() {
        if t > 1 || p > 1 || g > 1 {
            return Err(MetricError::NonBinary(i));
        }
        let group = if g == 1 { &mut c.privileged } else { &mut c.unprivileged };
        group.record(t, p);
    }
    Ok(c)
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Rates from a single confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rates {
    pub tpr: f64,
    pub fpr: f64,
    pub tnr: f64,
    pub fnr: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// No actual positives: TPR, FNR and recall are 0 by definition.
    pub no_positives: bool,
    /// No actual negatives: FPR and TNR are 0 by definition.
    pub no_negatives: bool,
    /// No predicted positives: precision is 0 by definition.
    pub no_predicted_positives: bool,
}

impl Rates {
    pub fn from_confusion(c: &Confusion) -> Rates {
        let (tpr, no_positives) = ratio(c.tp, c.positives());
        let (fnr, _) = ratio(c.fn_, c.positives());
        let (fpr, no_negatives) = ratio(c.fp, c.negatives());
        let (tnr, _) = ratio(c.tn, c.negatives());
        let (precision, no_predicted_positives) = ratio(c.tp, c.tp + c.fp);
        let recall = tpr;
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        Rates { tpr, fpr, tnr, fnr, precision, recall, f1, no_positives, no_negatives, no_predicted_positives }
    }

    pub fn is_degenerate(&self) -> bool {
        self.no_positives || self.no_negatives
    }
}

/// Half the sum of pooled TPR and TNR, with a degeneracy flag when either
/// class is absent (the value is then 0).
pub fn balanced_accuracy(c: &GroupConfusion) -> (f64, bool) {
    let r = c.pooled().rates();
    if r.is_degenerate() {
        (0.0, true)
    } else {
        (0.5 * (r.tpr + r.tnr), false)
    }
}

/// Balanced accuracy scaled by the mean closeness-to-parity of TPR and FPR:
/// `ba * ((1 - |tprd|) + (1 - |fprd|)) / 2`.
pub fn fair_utility(ba: f64, tprd: f64, fprd: f64) -> f64 {
    ba * 0.5 * ((1.0 - tprd.abs()) + (1.0 - fprd.abs()))
}

/// Group fairness summary. Differences are signed (privileged minus
/// unprivileged); `aao` and `eod` are magnitudes. Tables print magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub ba: f64,
    pub aod: f64,
    pub aao: f64,
    pub eod: f64,
    pub tnrd: f64,
    pub tprd: f64,
    pub fprd: f64,
    pub fair_utility: f64,
    pub degenerate: bool,
}

pub fn fairness_report(c: &GroupConfusion) -> FairnessReport {
    let (ba, ba_degenerate) = balanced_accuracy(c);
    let p = c.privileged.rates();
    let u = c.unprivileged.rates();
    let tprd = p.tpr - u.tpr;
    let fprd = p.fpr - u.fpr;
    // Without negatives in a group both rates are the 0 placeholder and
    // TNR = 1 - FPR no longer holds; fall back to that identity.
    let tnrd = if p.no_negatives || u.no_negatives { -fprd } else { p.tnr - u.tnr };
    FairnessReport {
        ba,
        aod: 0.5 * (tprd + fprd),
        aao: 0.5 * (tprd.abs() + fprd.abs()),
        eod: tprd.abs(),
        tnrd,
        tprd,
        fprd,
        fair_utility: fair_utility(ba, tprd, fprd),
        degenerate: ba_degenerate || p.is_degenerate() || u.is_degenerate(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn confusion(tp: u64, fn_: u64, fp: u64, tn: u64) -> Confusion {
        Confusion { tp, fp, tn, fn_ }
    }

    /// 20 privileged rows (TP 8, FN 2, FP 1, TN 9) and 20 unprivileged rows
    /// (TP 6, FN 4, FP 3, TN 7), laid out as explicit label vectors.
    fn hand_fixture() -> (Vec<u8>, Vec<u8>, Vec<u8>) {
        let mut t = Vec::new();
        let mut p = Vec::new();
        let mut g = Vec::new();
        for (group, blocks) in [(1u8, [(1, 1, 8), (1, 0, 2), (0, 1, 1), (0, 0, 9)]), (0, [(1, 1, 6), (1, 0, 4), (0, 1, 3), (0, 0, 7)])] {
            for (truth, pred, n) in blocks {
                for _ in 0..n {
                    t.push(truth);
                    p.push(pred);
                    g.push(group);
                }
            }
        }
        (t, p, g)
    }

    #[test]
    fn two_row_counts() {
        let c = confusion_by_group(&[1, 0], &[1, 0], &[1, 0]).unwrap();
        assert_eq!(c.privileged, confusion(1, 0, 0, 0));
        assert_eq!(c.unprivileged, confusion(0, 0, 0, 1));
    }

    #[test]
    fn all_positive_predictor() {
        let c = confusion_by_group(&[1, 0, 1, 0], &[1; 4], &[1, 1, 0, 0]).unwrap();
        for g in [c.privileged, c.unprivileged] {
            assert_eq!((g.fn_, g.tn), (0, 0));
        }
    }

    #[test]
    fn hand_fixture_counts_and_metrics() {
        let (t, p, g) = hand_fixture();
        let c = confusion_by_group(&t, &p, &g).unwrap();
        assert_eq!(c.privileged, confusion(8, 2, 1, 9));
        assert_eq!(c.unprivileged, confusion(6, 4, 3, 7));
        let r = fairness_report(&c);
        assert_abs_diff_eq!(r.tprd, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.fprd, -0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.aod, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.aao, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.eod, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.tnrd, 0.2, epsilon = 1e-12);
        assert!(!r.degenerate);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(confusion_by_group(&[1], &[1, 0], &[1]), Err(MetricError::LengthMismatch { .. })));
        assert_eq!(confusion_by_group(&[2], &[1], &[1]), Err(MetricError::NonBinary(0)));
    }

    #[test]
    fn balanced_accuracy_cases() {
        // TPR 0.8, TNR 0.6
        let c = GroupConfusion { privileged: confusion(8, 2, 4, 6), unprivileged: Confusion::default() };
        assert_abs_diff_eq!(balanced_accuracy(&c).0, 0.7, epsilon = 1e-12);
        let perfect = GroupConfusion { privileged: confusion(5, 0, 0, 5), unprivileged: confusion(2, 0, 0, 3) };
        assert_eq!(balanced_accuracy(&perfect), (1.0, false));
        // 9:1 data, everything predicted as the majority (positive) label
        let all_majority = GroupConfusion { privileged: confusion(90, 0, 10, 0), unprivileged: Confusion::default() };
        assert_abs_diff_eq!(balanced_accuracy(&all_majority).0, 0.5, epsilon = 1e-12);
        let no_negatives = GroupConfusion { privileged: confusion(3, 1, 0, 0), unprivileged: Confusion::default() };
        assert_eq!(balanced_accuracy(&no_negatives), (0.0, true));
    }

    #[test]
    fn symmetric_and_swapped_groups() {
        let same = GroupConfusion { privileged: confusion(5, 5, 2, 8), unprivileged: confusion(5, 5, 2, 8) };
        let r = fairness_report(&same);
        assert_eq!((r.aod, r.aao, r.eod, r.tnrd, r.tprd, r.fprd), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        let c = GroupConfusion { privileged: confusion(7, 3, 2, 8), unprivileged: confusion(4, 6, 5, 5) };
        let (a, b) = (fairness_report(&c), fairness_report(&c.swapped()));
        assert_abs_diff_eq!(a.aod, -b.aod, epsilon = 1e-15);
        assert_abs_diff_eq!(a.tnrd, -b.tnrd, epsilon = 1e-15);
        assert_abs_diff_eq!(a.tprd, -b.tprd, epsilon = 1e-15);
        assert_abs_diff_eq!(a.fprd, -b.fprd, epsilon = 1e-15);
        assert_eq!((a.aao, a.eod), (b.aao, b.eod));
    }

    #[test]
    fn degenerate_group_is_flagged() {
        let c = GroupConfusion { privileged: confusion(5, 5, 2, 8), unprivileged: confusion(0, 0, 1, 4) };
        let r = fairness_report(&c);
        assert!(r.degenerate);
        assert!(r.tprd.is_finite() && r.fair_utility.is_finite());
        let no_negatives = GroupConfusion { privileged: confusion(5, 5, 2, 8), unprivileged: confusion(3, 1, 0, 0) };
        let r = fairness_report(&no_negatives);
        assert!(r.degenerate);
        assert_eq!(r.tnrd, -r.fprd);
    }

    #[test]
    fn fair_utility_values() {
        assert_abs_diff_eq!(fair_utility(0.7003, 0.0460, 0.0166), 0.6784, epsilon = 5e-5);
        assert_eq!(fair_utility(1.0, 0.0, 0.0), 1.0);
        assert_eq!(fair_utility(0.5, 1.0, -1.0), 0.0);
    }

    #[test]
    fn report_serializes_with_fixed_names() {
        let r = fairness_report(&GroupConfusion { privileged: confusion(1, 1, 1, 1), unprivileged: confusion(1, 1, 1, 1) });
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        let mut want = vec!["aao", "aod", "ba", "degenerate", "eod", "fair_utility", "fprd", "tnrd", "tprd"];
        want.sort();
        assert_eq!(keys, want);
    }
}
