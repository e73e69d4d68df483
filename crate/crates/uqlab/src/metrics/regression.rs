//! Regression error metrics and rank correlation.

use crate::error::{Error, Result};

fn check_paired(context: &'static str, a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::shape(context, (a.len(), 1), (b.len(), 1)));
    }
    if a.is_empty() {
        return Err(Error::Domain(format!(
            "{context} requires at least one sample"
        )));
    }
    Ok(())
}

/// Mean absolute error between paired slices.
pub fn mae(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_paired("mae", pred, target)?;
    let sum: f64 = pred.iter().zip(target).map(|(p, t)| (p - t).abs()).sum();
    Ok(sum / pred.len() as f64)
}

/// Root mean squared error between paired slices.
pub fn rmse(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_paired("rmse", pred, target)?;
    let sum: f64 = pred
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok((sum / pred.len() as f64).sqrt())
}

/// Ranks starting at 1; ties receive the average of the positions they span.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
///
/// Undefined (domain error) when either input is constant, shorter than two
/// samples, or contains non-finite values.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    check_paired("spearman", a, b)?;
    if a.len() < 2 {
        return Err(Error::Domain(
            "spearman requires at least two samples".into(),
        ));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Domain("spearman requires finite values".into()));
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    // Ranks always average to (n + 1) / 2 regardless of ties.
    let mean = (a.len() + 1) as f64 / 2.0;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for k in 0..a.len() {
        let da = ra[k] - mean;
        let db = rb[k] - mean;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(Error::Domain(
            "spearman is undefined for constant input".into(),
        ));
    }
    Ok(cov / (var_a * var_b).sqrt())
}
