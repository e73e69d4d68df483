//! ROC curves, AUROC, and Youden threshold selection for score-based
//! two-set separation (e.g. ID vs OOD entropy).

use crate::error::{Error, Result};

/// ROC curve from sweeping a decision threshold across two score sets.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// (false-positive rate, true-positive rate) pairs ordered by descending
    /// threshold, starting at (0, 0) and ending at (1, 1).
    pub points: Vec<(f64, f64)>,
    /// Area under the curve by the trapezoid rule. Ties across the two sets
    /// contribute one half, so this equals the Mann-Whitney statistic.
    pub auroc: f64,
    /// Threshold maximizing TPR - FPR; ties resolve to the lowest
    /// qualifying threshold.
    pub youden_threshold: f64,
}

/// Sweep thresholds over ID (negative) and OOD (positive) scores. A sample
/// counts as flagged when its score is at or above the threshold, so higher
/// scores must mean "more positive".
pub fn roc(scores_negative: &[f64], scores_positive: &[f64]) -> Result<RocCurve> {
    if scores_negative.is_empty() || scores_positive.is_empty() {
        return Err(Error::Domain(
            "roc requires at least one score on each side".into(),
        ));
    }
    if scores_negative
        .iter()
        .chain(scores_positive)
        .any(|v| !v.is_finite())
    {
        return Err(Error::Domain("roc scores must be finite".into()));
    }

    let mut tagged: Vec<(f64, bool)> = scores_negative
        .iter()
        .map(|&s| (s, false))
        .chain(scores_positive.iter().map(|&s| (s, true)))
        .collect();
    tagged.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite scores"));

    let n_neg = scores_negative.len() as f64;
    let n_pos = scores_positive.len() as f64;
    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut auroc = 0.0;
    let mut best_j = f64::NEG_INFINITY;
    let mut youden_threshold = tagged[0].0;
    let mut i = 0;
    while i < tagged.len() {
        let threshold = tagged[i].0;
        let (prev_fpr, prev_tpr) = *points.last().expect("seeded with the origin");
        // Consume the whole tie group so equal scores form a single curve
        // segment (a diagonal step when the group mixes both sets).
        while i < tagged.len() && tagged[i].0 == threshold {
            if tagged[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let fpr = fp as f64 / n_neg;
        let tpr = tp as f64 / n_pos;
        auroc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        // >= keeps replacing on ties; descending walk means the last winner
        // is the lowest threshold.
        let j = tpr - fpr;
        if j >= best_j {
            best_j = j;
            youden_threshold = threshold;
        }
        points.push((fpr, tpr));
    }
    Ok(RocCurve {
        points,
        auroc,
        youden_threshold,
    })
}
