use serde::{Deserialize, Serialize};

use super::features::{FeatureMatrix, LabelVector};
use super::model::{predict_score, TrainedModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub confusion: Confusion,
    /// `(fpr, tpr)` from `(0, 0)` to `(1, 1)`.
    pub roc_points: Vec<(f64, f64)>,
    pub auc: f64,
    pub threshold: f64,
}

/// ROC points from sweeping every distinct score as a threshold, highest
/// first; tied scores enter the curve together as one diagonal step.
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<Vec<(f64, f64)>> {
    if scores.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch { left: scores.len(), right: labels.len() });
    }
    let pos = labels.iter().filter(|&&c| c == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClassEvaluation);
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFiniteInput { index: i });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        while k < order.len() && scores[order[k]] == s {
            if labels[order[k]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    Ok(points)
}

pub fn trapezoid_auc(points: &[(f64, f64)]) -> f64 {
    points.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum()
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half, via average ranks.
pub fn rank_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch { left: scores.len(), right: labels.len() });
    }
    let pos = labels.iter().filter(|&&c| c == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClassEvaluation);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; scores.len()];
    let mut k = 0;
    while k < order.len() {
        let mut j = k;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[k]] {
            j += 1;
        }
        let avg = (k + j) as f64 / 2.0 + 1.0;
        for &i in &order[k..=j] {
            ranks[i] = avg;
        }
        k = j + 1;
    }
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &c)| c == 1).map(|(r, _)| r).sum();
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Accuracy and confusion counts at `threshold` (score `>=` threshold means
/// AD), plus the ROC curve and its area.
pub fn evaluate_scores(scores: &[f64], labels: &[u8], threshold: f64) -> Result<EvalReport> {
    let roc_points = roc_curve(scores, labels)?;
    let auc = trapezoid_auc(&roc_points);
    let mut c = Confusion::default();
    for (&s, &y) in scores.iter().zip(labels) {
        match (s >= threshold, y == 1) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(EvalReport { accuracy: (c.tp + c.tn) as f64 / c.total() as f64, confusion: c, roc_points, auc, threshold })
}

pub fn evaluate(model: &TrainedModel, x: &FeatureMatrix, y: &LabelVector, threshold: f64) -> Result<EvalReport> {
    if x.n_rows() == 0 {
        return Err(Error::EmptyEvaluation);
    }
    let scores = predict_score(model, x)?;
    evaluate_scores(&scores, y.as_slice(), threshold)
}

/// Fraction of rows on the correct side of `threshold`.
pub fn accuracy(scores: &[f64], labels: &[u8], threshold: f64) -> f64 {
    let hits = scores.iter().zip(labels).filter(|(&s, &y)| (s >= threshold) == (y == 1)).count();
    hits as f64 / scores.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rankings() {
        let y = [0, 0, 1, 1];
        assert_eq!(evaluate_scores(&[0.1, 0.2, 0.8, 0.9], &y, 0.5).unwrap().auc, 1.0);
        assert_eq!(evaluate_scores(&[0.9, 0.8, 0.2, 0.1], &y, 0.5).unwrap().auc, 0.0);
        assert_eq!(evaluate_scores(&[0.3; 4], &y, 0.5).unwrap().auc, 0.5);
        assert_eq!(rank_auc(&[0.3; 4], &y).unwrap(), 0.5);
    }

    #[test]
    fn confusion_counts() {
        let r = evaluate_scores(&[0.9, 0.4, 0.6, 0.1], &[1, 1, 0, 0], 0.5).unwrap();
        assert_eq!(r.confusion, Confusion { tp: 1, fp: 1, tn: 1, fn_: 1 });
        assert_eq!(r.accuracy, 0.5);
        assert_eq!(r.confusion.total(), 4);
        assert_eq!(r.roc_points.first(), Some(&(0.0, 0.0)));
        assert_eq!(r.roc_points.last(), Some(&(1.0, 1.0)));
    }

    #[test]
    fn guards() {
        assert!(matches!(evaluate_scores(&[], &[], 0.5), Err(Error::EmptyEvaluation)));
        assert!(matches!(rank_auc(&[0.1, 0.2], &[1, 1]), Err(Error::SingleClassEvaluation)));
        let json = serde_json::to_string(&Confusion { tp: 1, fp: 2, tn: 3, fn_: 4 }).unwrap();
        assert!(json.contains("\"fn\":4"));
    }
}
