//! Training losses: mean squared error and the Gaussian negative
//! log-likelihood used for heteroscedastic regression.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::mlp::Prediction;

/// Loss selector for training and gradient routines. `Mse` applies to
/// single-head networks, `GaussianNll` to two-headed ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    Mse,
    GaussianNll,
}

impl Loss {
    pub fn name(self) -> &'static str {
        match self {
            Loss::Mse => "mse",
            Loss::GaussianNll => "gaussian_nll",
        }
    }

    pub fn parse(name: &str) -> Result<Loss> {
        match name {
            "mse" => Ok(Loss::Mse),
            "gaussian_nll" => Ok(Loss::GaussianNll),
            other => Err(Error::Config(format!("unknown loss '{other}'"))),
        }
    }
}

/// Mean squared error averaged over every entry of the batch.
pub fn loss_mse(pred: &Matrix, target: &Matrix) -> Result<f64> {
    pred.check_same_shape(target, "mse prediction vs target")?;
    let n = pred.as_slice().len() as f64;
    let sum: f64 = pred
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / n)
}

/// Per-point Gaussian negative log-likelihood up to the constant
/// `ln(2 pi) / 2`: `ln(var) / 2 + (mu - y)^2 / (2 var)`.
pub fn loss_gaussian_nll(mu: f64, var: f64, y: f64) -> Result<f64> {
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::Domain(format!(
            "gaussian nll needs a positive finite variance, got {var}"
        )));
    }
    let r = mu - y;
    Ok(0.5 * var.ln() + r * r / (2.0 * var))
}

/// Batch Gaussian negative log-likelihood averaged over every entry.
pub fn loss_gaussian_nll_batch(mu: &Matrix, var: &Matrix, target: &Matrix) -> Result<f64> {
    mu.check_same_shape(var, "nll mean vs variance")?;
    mu.check_same_shape(target, "nll mean vs target")?;
    let mut sum = 0.0;
    for ((&m, &v), &y) in mu
        .as_slice()
        .iter()
        .zip(var.as_slice())
        .zip(target.as_slice())
    {
        sum += loss_gaussian_nll(m, v, y)?;
    }
    Ok(sum / mu.as_slice().len() as f64)
}

/// Evaluates `loss` on a prediction, enforcing the head/loss pairing.
pub fn evaluate_loss(prediction: &Prediction, target: &Matrix, loss: Loss) -> Result<f64> {
    match (loss, prediction) {
        (Loss::Mse, Prediction::Values(values)) => loss_mse(values, target),
        (Loss::GaussianNll, Prediction::MeanVariance { mu, var }) => {
            loss_gaussian_nll_batch(mu, var, target)
        }
        (Loss::Mse, Prediction::MeanVariance { .. }) => Err(Error::Config(
            "mse loss requires a single-head network".into(),
        )),
        (Loss::GaussianNll, Prediction::Values(_)) => Err(Error::Config(
            "gaussian_nll loss requires a two-headed network".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_hand_computed() {
        let pred = Matrix::from_vec(2, 1, vec![0.0, 0.0]).unwrap();
        let target = Matrix::from_vec(2, 1, vec![1.0, 3.0]).unwrap();
        assert_eq!(loss_mse(&pred, &target).unwrap(), 5.0);
    }

    #[test]
    fn mse_shape_mismatch_rejected() {
        let pred = Matrix::zeros(2, 1);
        let target = Matrix::zeros(3, 1);
        assert!(loss_mse(&pred, &target).is_err());
    }

    #[test]
    fn nll_hand_computed() {
        // mu=1, var=4, y=3: ln(4)/2 + 4/8 = ln(2) + 0.5
        let got = loss_gaussian_nll(1.0, 4.0, 3.0).unwrap();
        assert!((got - (2.0_f64.ln() + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn nll_is_minimized_when_variance_matches_residual() {
        // For fixed residual r, d/dvar [ln(var)/2 + r^2/(2 var)] = 0 at var = r^2.
        let r: f64 = 0.7;
        let at_min = loss_gaussian_nll(r, r * r, 0.0).unwrap();
        for &var in &[r * r * 0.5, r * r * 0.9, r * r * 1.1, r * r * 2.0] {
            assert!(loss_gaussian_nll(r, var, 0.0).unwrap() > at_min);
        }
    }

    #[test]
    fn nll_rejects_non_positive_variance() {
        assert!(loss_gaussian_nll(0.0, 0.0, 0.0).is_err());
        assert!(loss_gaussian_nll(0.0, -1.0, 0.0).is_err());
        assert!(loss_gaussian_nll(0.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn batch_nll_averages_entries() {
        let mu = Matrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap();
        let var = Matrix::from_vec(2, 1, vec![4.0, 1.0]).unwrap();
        let y = Matrix::from_vec(2, 1, vec![3.0, 2.0]).unwrap();
        let a = loss_gaussian_nll(1.0, 4.0, 3.0).unwrap();
        let b = loss_gaussian_nll(0.0, 1.0, 2.0).unwrap();
        let got = loss_gaussian_nll_batch(&mu, &var, &y).unwrap();
        assert!((got - 0.5 * (a + b)).abs() < 1e-15);
    }

    #[test]
    fn loss_head_pairing_enforced() {
        let values = Prediction::Values(Matrix::zeros(1, 1));
        let target = Matrix::zeros(1, 1);
        assert!(matches!(
            evaluate_loss(&values, &target, Loss::GaussianNll).unwrap_err(),
            Error::Config(_)
        ));
    }
}
