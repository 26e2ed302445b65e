//! Confusion-matrix metrics, cost accounting and threshold-sweep curves.
//!
//! Fault (class 0) is the positive class: higher scores are more fault-like
//! and a sample is predicted a fault when its score reaches the threshold.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::classify::CostMatrix;
use crate::dataio::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    /// True fault predicted fault.
    pub tp: u64,
    /// True fault-free predicted fault.
    pub fp: u64,
    /// True fault-free predicted fault-free.
    pub tn: u64,
    /// True fault predicted fault-free.
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.fp + self.tn
    }

    pub fn add(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Fault, Label::Fault) => self.tp += 1,
            (Label::Fault, Label::FaultFree) => self.fn_ += 1,
            (Label::FaultFree, Label::Fault) => self.fp += 1,
            (Label::FaultFree, Label::FaultFree) => self.tn += 1,
        }
    }

    /// Recall of the fault class, `tp / (tp + fn)`.
    pub fn tpr(&self) -> MetricValue {
        MetricValue::ratio(self.tp, self.positives())
    }

    pub fn tnr(&self) -> MetricValue {
        MetricValue::ratio(self.tn, self.negatives())
    }

    pub fn fpr(&self) -> MetricValue {
        MetricValue::ratio(self.fp, self.negatives())
    }

    pub fn precision(&self) -> MetricValue {
        MetricValue::ratio(self.tp, self.tp + self.fp)
    }
}

/// A metric value; `degenerate` marks a 0/0 that was reported as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue {
    pub value: f64,
    pub degenerate: bool,
}

impl MetricValue {
    fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            Self { value: 0.0, degenerate: true }
        } else {
            Self { value: num as f64 / den as f64, degenerate: false }
        }
    }
}

pub fn confusion(truth: &[Label], predicted: &[Label]) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch { left: truth.len(), right: predicted.len() });
    }
    if truth.is_empty() {
        return Err(Error::Undefined("confusion matrix of zero samples".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in truth.iter().zip(predicted) {
        cm.add(t, p);
    }
    Ok(cm)
}

pub fn total_cost(cm: &ConfusionMatrix, cost: &CostMatrix) -> f64 {
    cost.c01 * cm.fn_ as f64 + cost.c10 * cm.fp as f64 + cost.c00 * cm.tp as f64 + cost.c11 * cm.tn as f64
}

/// `(1 + b^2) P R / (b^2 P + R)`; 0 (flagged) when `tp = 0`.
pub fn f_measure(cm: &ConfusionMatrix, beta: f64) -> MetricValue {
    if cm.tp == 0 {
        return MetricValue { value: 0.0, degenerate: true };
    }
    let p = cm.precision().value;
    let r = cm.tpr().value;
    let b2 = beta * beta;
    MetricValue { value: (1.0 + b2) * p * r / (b2 * p + r), degenerate: false }
}

/// `sqrt(tpr * tnr)`; both classes must be present.
pub fn g_mean(cm: &ConfusionMatrix) -> Result<f64> {
    if cm.positives() == 0 || cm.negatives() == 0 {
        return Err(Error::Undefined("G-mean needs both classes".into()));
    }
    Ok((cm.tpr().value * cm.tnr().value).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Score threshold producing this point; `+inf` for the origin.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// Group `(score, label)` pairs by distinct score, highest first, returning
/// `(score, positives, negatives)` per group.
fn score_groups(truth: &[Label], scores: &[f64]) -> Result<Vec<(f64, u64, u64)>> {
    if truth.len() != scores.len() {
        return Err(Error::LengthMismatch { left: truth.len(), right: scores.len() });
    }
    if let Some(s) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::Undefined(format!("non-finite score {s}")));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut groups: Vec<(f64, u64, u64)> = Vec::new();
    for i in order {
        let s = scores[i];
        let (p, n) = if truth[i] == Label::Fault { (1, 0) } else { (0, 1) };
        match groups.last_mut() {
            // -0.0 and 0.0 are one threshold
            Some(g) if g.0.partial_cmp(&s) == Some(Ordering::Equal) => {
                g.1 += p;
                g.2 += n;
            }
            _ => groups.push((s, p, n)),
        }
    }
    Ok(groups)
}

/// ROC by sweeping every distinct score from high to low. A tie group moves
/// the curve in one (possibly diagonal) step. AUC is the trapezoidal area,
/// accumulated in integer counts.
pub fn roc(truth: &[Label], scores: &[f64]) -> Result<RocCurve> {
    let groups = score_groups(truth, scores)?;
    let pos: u64 = groups.iter().map(|g| g.1).sum();
    let neg: u64 = groups.iter().map(|g| g.2).sum();
    if pos == 0 || neg == 0 {
        return Err(Error::Undefined("ROC needs both classes".into()));
    }
    let mut points = Vec::with_capacity(groups.len() + 1);
    points.push(RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY });
    let (mut tp, mut fp) = (0u64, 0u64);
    // twice the area, in units of 1/(pos*neg)
    let mut area2: u128 = 0;
    for &(s, p, n) in &groups {
        area2 += n as u128 * (2 * tp as u128 + p as u128);
        tp += p;
        fp += n;
        points.push(RocPoint { fpr: fp as f64 / neg as f64, tpr: tp as f64 / pos as f64, threshold: s });
    }
    let auc = area2 as f64 / (2.0 * pos as f64 * neg as f64);
    Ok(RocCurve { points, auc })
}

impl RocCurve {
    /// Highest TPR reached at `fpr`, linear between curve points.
    pub fn tpr_at(&self, fpr: f64) -> f64 {
        let pts = &self.points;
        let k = pts.partition_point(|p| p.fpr <= fpr);
        if k == 0 {
            return 0.0;
        }
        if k == pts.len() {
            return pts[k - 1].tpr;
        }
        let (a, b) = (&pts[k - 1], &pts[k]);
        a.tpr + (b.tpr - a.tpr) * (fpr - a.fpr) / (b.fpr - a.fpr)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("fpr,tpr,threshold\n");
        for p in &self.points {
            writeln!(out, "{},{},{}", p.fpr, p.tpr, p.threshold).unwrap();
        }
        out
    }
}

/// Vertical average of several ROC curves on `n_grid` evenly spaced FPR
/// values in [0, 1].
pub fn mean_roc(curves: &[RocCurve], n_grid: usize) -> Vec<(f64, f64)> {
    let n_grid = n_grid.max(2);
    (0..n_grid)
        .map(|g| {
            let x = g as f64 / (n_grid - 1) as f64;
            let y = if curves.is_empty() {
                0.0
            } else {
                curves.iter().map(|c| c.tpr_at(x)).sum::<f64>() / curves.len() as f64
            };
            (x, y)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
    pub threshold: f64,
}

/// One (recall, precision) point per distinct score, highest threshold first.
pub fn pr_curve(truth: &[Label], scores: &[f64]) -> Result<Vec<PrPoint>> {
    let groups = score_groups(truth, scores)?;
    let pos: u64 = groups.iter().map(|g| g.1).sum();
    if pos == 0 {
        return Err(Error::Undefined("precision-recall needs positive samples".into()));
    }
    let (mut tp, mut fp) = (0u64, 0u64);
    Ok(groups
        .iter()
        .map(|&(s, p, n)| {
            tp += p;
            fp += n;
            PrPoint { recall: tp as f64 / pos as f64, precision: tp as f64 / (tp + fp) as f64, threshold: s }
        })
        .collect())
}

pub fn pr_to_csv(points: &[PrPoint]) -> String {
    let mut out = String::from("recall,precision,threshold\n");
    for p in points {
        writeln!(out, "{},{},{}", p.recall, p.precision, p.threshold).unwrap();
    }
    out
}

/// Average ranks (1-based), ties sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let r = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation; `None` when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Fault as F, FaultFree as O};

    #[test]
    fn confusion_basic() {
        let cm = confusion(&[F, F, F, F], &[F, F, F, F]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 4, ..Default::default() });
        let cm = confusion(&[F, F, O, O], &[F, O, F, O]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 1, fn_: 1, fp: 1, tn: 1 });
        assert!(matches!(confusion(&[F], &[F, O]), Err(Error::LengthMismatch { .. })));
        assert!(confusion(&[], &[]).is_err());
    }

    #[test]
    fn cost_arithmetic() {
        let cm = ConfusionMatrix { tp: 5, fp: 2, tn: 9, fn_: 3 };
        assert_eq!(total_cost(&cm, &CostMatrix::with_ratio(10.0)), 32.0);
        let perfect = ConfusionMatrix { tp: 5, fp: 0, tn: 9, fn_: 0 };
        assert_eq!(total_cost(&perfect, &CostMatrix::with_ratio(10.0)), 0.0);
    }

    #[test]
    fn f_and_g() {
        let cm = ConfusionMatrix { tp: 1, fp: 1, fn_: 1, tn: 0 };
        assert!((f_measure(&cm, 1.0).value - 0.5).abs() < 1e-15);
        let perfect = ConfusionMatrix { tp: 3, fp: 0, fn_: 0, tn: 4 };
        assert_eq!(f_measure(&perfect, 1.0).value, 1.0);
        assert_eq!(g_mean(&perfect).unwrap(), 1.0);
        let miss = ConfusionMatrix { tp: 0, fp: 0, fn_: 3, tn: 4 };
        assert_eq!(g_mean(&miss).unwrap(), 0.0);
        let f = f_measure(&miss, 1.0);
        assert!(f.degenerate && f.value == 0.0);
        assert!(g_mean(&ConfusionMatrix { tp: 2, ..Default::default() }).is_err());
    }

    #[test]
    fn roc_separating_and_tied() {
        let truth = [F, F, O, O, O];
        let c = roc(&truth, &[0.9, 0.8, 0.1, 0.2, 0.3]).unwrap();
        assert_eq!(c.auc, 1.0);
        let c = roc(&truth, &[0.5; 5]).unwrap();
        assert_eq!(c.points.len(), 2);
        assert_eq!((c.points[0].fpr, c.points[0].tpr), (0.0, 0.0));
        assert_eq!((c.points[1].fpr, c.points[1].tpr), (1.0, 1.0));
        assert_eq!(c.auc, 0.5);
        assert!(roc(&[F, F], &[0.1, 0.2]).is_err());
        assert!(roc(&[F, O], &[0.1, f64::NAN]).is_err());
    }

    #[test]
    fn roc_reversed_scores() {
        let truth = [F, O, F, O, O, F];
        let s = [0.3, 0.1, 0.7, 0.3, 0.9, 0.2];
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let a = roc(&truth, &s).unwrap().auc;
        let b = roc(&truth, &neg).unwrap().auc;
        assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pr_cases() {
        let truth = [F, F, O, O];
        let p = pr_curve(&truth, &[0.9, 0.8, 0.2, 0.1]).unwrap();
        assert!(p.iter().filter(|q| q.recall <= 1.0 && q.threshold >= 0.8).all(|q| q.precision == 1.0));
        let p = pr_curve(&truth, &[0.4; 4]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].recall, p[0].precision), (1.0, 0.5));
        assert!(pr_curve(&[O, O], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn mean_roc_of_diagonal() {
        let c = roc(&[F, O], &[0.0, 0.0]).unwrap();
        let m = mean_roc(&[c.clone(), c], 11);
        for (x, y) in m {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn spearman_basics() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]), None);
        assert_eq!(average_ranks(&[2.0, 1.0, 2.0]), vec![2.5, 1.0, 2.5]);
    }
}
