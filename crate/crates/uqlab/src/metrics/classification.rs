//! Classification scores: predictive entropy and the Brier score.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Slack allowed between a probability vector's sum and exactly 1.
const DISTRIBUTION_TOLERANCE: f64 = 1e-6;

pub(crate) fn check_distribution(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Domain("probability vector is empty".into()));
    }
    let mut total = 0.0;
    for &p in probs {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::Domain(format!(
                "probability {p} is negative or non-finite"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(Error::Domain(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Shannon entropy in nats, with the convention 0 * ln 0 = 0.
pub fn entropy(probs: &[f64]) -> Result<f64> {
    check_distribution(probs)?;
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    // A one-hot distribution sums to -0.0; normalize the sign.
    Ok(h + 0.0)
}

/// Mean squared distance between predicted class distributions and the
/// one-hot encoding of the true class, averaged over samples.
pub fn brier(probs: &Matrix, true_class: &[usize]) -> Result<f64> {
    if probs.rows() != true_class.len() {
        return Err(Error::shape(
            "brier",
            (probs.rows(), probs.cols()),
            (true_class.len(), 1),
        ));
    }
    if probs.rows() == 0 {
        return Err(Error::Domain("brier requires at least one sample".into()));
    }
    let mut total = 0.0;
    for (row, &class) in probs.iter_rows().zip(true_class) {
        check_distribution(row)?;
        if class >= probs.cols() {
            return Err(Error::Domain(format!(
                "true class {class} out of range for {} classes",
                probs.cols()
            )));
        }
        for (k, &p) in row.iter().enumerate() {
            let target = if k == class { 1.0 } else { 0.0 };
            total += (p - target) * (p - target);
        }
    }
    Ok(total / probs.rows() as f64)
}
