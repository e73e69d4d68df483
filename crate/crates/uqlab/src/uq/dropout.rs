//! Monte-Carlo dropout and DropConnect prediction: stochastic forward
//! passes through a trained deterministic network.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::mlp::check_dropout_rate;
use crate::nn::{sample_activation_masks, Head, Mlp, Prediction};
use crate::rng::RngState;
use crate::uq::stochastic::{summarize_samples, McPrediction};

fn check_mc_inputs(net: &Mlp, inputs: &Matrix, rate: f64, n_samples: usize) -> Result<()> {
    if net.is_two_headed() {
        return Err(Error::Config(
            "Monte-Carlo mask prediction expects a single-head network".into(),
        ));
    }
    check_dropout_rate(rate)?;
    if n_samples == 0 {
        return Err(Error::Config("n_samples must be at least 1".into()));
    }
    if inputs.cols() != net.input_dim() {
        return Err(Error::shape(
            "input width does not match the network",
            (inputs.rows(), net.input_dim()),
            inputs.shape(),
        ));
    }
    Ok(())
}

fn expect_values(prediction: Prediction) -> Matrix {
    match prediction {
        Prediction::Values(v) => v,
        _ => unreachable!("two-headed networks rejected earlier"),
    }
}

/// Dropout at prediction time: each sample independently zeroes every
/// hidden activation with probability `rate` and scales survivors by
/// `1/(1-rate)`, so the expectation matches the deterministic forward pass.
pub fn mc_dropout_predict(
    net: &Mlp,
    inputs: &Matrix,
    rate: f64,
    n_samples: usize,
    rng: &mut RngState,
) -> Result<McPrediction> {
    check_mc_inputs(net, inputs, rate, n_samples)?;
    let mut samples = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let masks = sample_activation_masks(net, inputs.rows(), rate, rng)?;
        samples.push(expect_values(net.forward_masked(inputs, Some(&masks))?));
    }
    Ok(summarize_samples(samples))
}

/// Flat-parameter index ranges of the weight matrices (biases excluded),
/// in [`Mlp::params`] order.
fn weight_ranges(net: &Mlp) -> Vec<std::ops::Range<usize>> {
    let mut ranges = Vec::new();
    let mut offset = 0;
    for layer in net.hidden_layers() {
        let w = layer.out_dim() * layer.in_dim();
        ranges.push(offset..offset + w);
        offset += layer.param_count();
    }
    if let Head::Single(layer) = net.head() {
        let w = layer.out_dim() * layer.in_dim();
        ranges.push(offset..offset + w);
    }
    ranges
}

/// DropConnect at prediction time: each sample independently zeroes every
/// individual weight (in all layers, head included; biases keep their
/// values) with probability `rate`, scaling survivors by `1/(1-rate)`.
pub fn mc_dropconnect_predict(
    net: &Mlp,
    inputs: &Matrix,
    rate: f64,
    n_samples: usize,
    rng: &mut RngState,
) -> Result<McPrediction> {
    check_mc_inputs(net, inputs, rate, n_samples)?;
    let base = net.params();
    let ranges = weight_ranges(net);
    let keep = 1.0 / (1.0 - rate);
    let mut scratch = net.clone();
    let mut params = base.clone();
    let mut samples = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        params.copy_from_slice(&base);
        for range in &ranges {
            for value in &mut params[range.clone()] {
                *value *= if rng.bernoulli(rate) { 0.0 } else { keep };
            }
        }
        scratch.set_params(&params)?;
        samples.push(expect_values(scratch.forward(inputs)?));
    }
    Ok(summarize_samples(samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation;

    fn trained_like_net(seed: u64) -> Mlp {
        let mut rng = RngState::new(seed);
        Mlp::single(&[2, 8, 3], Activation::Tanh, Activation::Identity, &mut rng).unwrap()
    }

    #[test]
    fn zero_rate_dropout_is_deterministic() {
        let net = trained_like_net(1);
        let x = Matrix::from_vec(2, 2, vec![0.1, -0.4, 0.9, 0.3]).unwrap();
        let pred = mc_dropout_predict(&net, &x, 0.0, 8, &mut RngState::new(2)).unwrap();
        let baseline = expect_values(net.forward(&x).unwrap());
        for sample in &pred.samples {
            assert_eq!(sample.as_slice(), baseline.as_slice());
        }
        assert!(pred.variance.as_slice().iter().all(|&v| v < 1e-12));
    }

    #[test]
    fn zero_rate_dropconnect_is_deterministic() {
        let net = trained_like_net(3);
        let x = Matrix::from_vec(1, 2, vec![0.5, -0.2]).unwrap();
        let pred = mc_dropconnect_predict(&net, &x, 0.0, 8, &mut RngState::new(4)).unwrap();
        let baseline = expect_values(net.forward(&x).unwrap());
        for sample in &pred.samples {
            assert_eq!(sample.as_slice(), baseline.as_slice());
        }
    }

    #[test]
    fn positive_rate_produces_spread() {
        let net = trained_like_net(5);
        let x = Matrix::from_vec(1, 2, vec![0.8, 0.6]).unwrap();
        let dropout = mc_dropout_predict(&net, &x, 0.5, 32, &mut RngState::new(6)).unwrap();
        let dropconnect = mc_dropconnect_predict(&net, &x, 0.5, 32, &mut RngState::new(7)).unwrap();
        assert!(dropout.variance.as_slice().iter().any(|&v| v > 0.0));
        assert!(dropconnect.variance.as_slice().iter().any(|&v| v > 0.0));
    }

    #[test]
    fn dropout_expectation_matches_deterministic_forward() {
        // Identity activations make the output linear in the masked hidden
        // units, so E[masked output] equals the unmasked output.
        let mut rng = RngState::new(8);
        let net = Mlp::single(&[1, 4, 1], Activation::Identity, Activation::Identity, &mut rng).unwrap();
        let x = Matrix::from_vec(1, 1, vec![1.3]).unwrap();
        let deterministic = expect_values(net.forward(&x).unwrap()).get(0, 0);
        let n = 100_000;
        let pred = mc_dropout_predict(&net, &x, 0.4, n, &mut RngState::new(9)).unwrap();
        let se = (pred.variance.get(0, 0) / n as f64).sqrt();
        let gap = (pred.mean.get(0, 0) - deterministic).abs();
        assert!(gap < 4.0 * se, "gap {gap} exceeds {}", 4.0 * se);
    }

    #[test]
    fn dropconnect_expectation_matches_deterministic_forward() {
        // Single linear layer: masking weights with inverted scaling keeps
        // the expectation at the unmasked output.
        let mut rng = RngState::new(10);
        let net = Mlp::single(&[3, 1], Activation::Tanh, Activation::Identity, &mut rng).unwrap();
        assert!(net.hidden_layers().is_empty());
        let x = Matrix::from_vec(1, 3, vec![0.9, -1.1, 0.4]).unwrap();
        let deterministic = expect_values(net.forward(&x).unwrap()).get(0, 0);
        let n = 100_000;
        let pred = mc_dropconnect_predict(&net, &x, 0.3, n, &mut RngState::new(11)).unwrap();
        let se = (pred.variance.get(0, 0) / n as f64).sqrt();
        let gap = (pred.mean.get(0, 0) - deterministic).abs();
        assert!(gap < 4.0 * se, "gap {gap} exceeds {}", 4.0 * se);
    }

    #[test]
    fn mask_prediction_is_deterministic_per_seed() {
        let net = trained_like_net(12);
        let x = Matrix::from_vec(2, 2, vec![0.2, 0.3, -0.6, 0.1]).unwrap();
        let a = mc_dropout_predict(&net, &x, 0.25, 16, &mut RngState::new(13)).unwrap();
        let b = mc_dropout_predict(&net, &x, 0.25, 16, &mut RngState::new(13)).unwrap();
        assert_eq!(a.mean.as_slice(), b.mean.as_slice());
        assert_eq!(a.variance.as_slice(), b.variance.as_slice());
    }

    #[test]
    fn invalid_rates_and_heads_rejected() {
        let net = trained_like_net(14);
        let x = Matrix::from_vec(1, 2, vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            mc_dropout_predict(&net, &x, 1.0, 4, &mut RngState::new(1)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            mc_dropout_predict(&net, &x, 0.2, 0, &mut RngState::new(1)),
            Err(Error::Config(_))
        ));
        let mut rng = RngState::new(15);
        let two_headed = Mlp::two_headed(2, &[4], 1, Activation::Tanh, &mut rng).unwrap();
        assert!(matches!(
            mc_dropout_predict(&two_headed, &x, 0.2, 4, &mut RngState::new(1)),
            Err(Error::Config(_))
        ));
    }
}
