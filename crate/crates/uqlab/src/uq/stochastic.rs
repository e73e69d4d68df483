//! Networks whose weights are Gaussian distributions, with Monte-Carlo
//! prediction by repeated weight sampling.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::{Activation, DenseLayer, Head, Mlp};
use crate::rng::RngState;

/// Dense layer whose every weight and bias is an independent Gaussian.
/// A standard deviation of exactly zero marks that entry deterministic.
#[derive(Debug, Clone)]
pub struct GaussianWeightLayer {
    weight_mean: Matrix,
    weight_stddev: Matrix,
    bias_mean: Vec<f64>,
    bias_stddev: Vec<f64>,
    activation: Activation,
}

impl GaussianWeightLayer {
    pub fn new(
        weight_mean: Matrix,
        weight_stddev: Matrix,
        bias_mean: Vec<f64>,
        bias_stddev: Vec<f64>,
        activation: Activation,
    ) -> Result<GaussianWeightLayer> {
        weight_mean.check_same_shape(&weight_stddev, "weight mean vs stddev")?;
        if bias_mean.len() != weight_mean.rows() || bias_stddev.len() != weight_mean.rows() {
            return Err(Error::shape(
                "bias length must equal the weight row count",
                (weight_mean.rows(), 1),
                (bias_mean.len(), 1),
            ));
        }
        let stddev_ok = |s: &f64| s.is_finite() && *s >= 0.0;
        if !weight_stddev.as_slice().iter().all(stddev_ok) || !bias_stddev.iter().all(stddev_ok) {
            return Err(Error::Domain(
                "weight standard deviations must be finite and non-negative".into(),
            ));
        }
        if bias_mean.iter().any(|b| !b.is_finite()) {
            return Err(Error::Domain("bias means must be finite".into()));
        }
        Ok(GaussianWeightLayer { weight_mean, weight_stddev, bias_mean, bias_stddev, activation })
    }

    /// Random distribution spec: Glorot-drawn means, one shared stddev.
    pub fn random(
        in_dim: usize,
        out_dim: usize,
        stddev: f64,
        activation: Activation,
        rng: &mut RngState,
    ) -> Result<GaussianWeightLayer> {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let weight_mean = Matrix::from_fn(out_dim, in_dim, |_, _| rng.uniform_in(-limit, limit));
        GaussianWeightLayer::new(
            weight_mean,
            Matrix::from_fn(out_dim, in_dim, |_, _| stddev),
            vec![0.0; out_dim],
            vec![stddev; out_dim],
            activation,
        )
    }

    pub fn in_dim(&self) -> usize {
        self.weight_mean.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weight_mean.rows()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn param_count(&self) -> usize {
        self.weight_mean.rows() * self.weight_mean.cols() + self.bias_mean.len()
    }

    /// Appends (mean, stddev) pairs in flat order: weights row-major, then
    /// biases. Matches the parameter order of the sampled [`Mlp`].
    fn write_distribution(&self, means: &mut Vec<f64>, stddevs: &mut Vec<f64>) {
        means.extend_from_slice(self.weight_mean.as_slice());
        means.extend_from_slice(&self.bias_mean);
        stddevs.extend_from_slice(self.weight_stddev.as_slice());
        stddevs.extend_from_slice(&self.bias_stddev);
    }
}

/// A network of [`GaussianWeightLayer`]s; the last layer is the output head.
#[derive(Debug, Clone)]
pub struct StochasticNet {
    layers: Vec<GaussianWeightLayer>,
}

impl StochasticNet {
    pub fn new(layers: Vec<GaussianWeightLayer>) -> Result<StochasticNet> {
        if layers.is_empty() {
            return Err(Error::Config("a stochastic network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[1].in_dim() != pair[0].out_dim() {
                return Err(Error::shape(
                    "stochastic layers do not chain",
                    (pair[0].out_dim(), 1),
                    (pair[1].in_dim(), 1),
                ));
            }
        }
        Ok(StochasticNet { layers })
    }

    /// Network over `dims` (input width through output width) with random
    /// weight means and a shared stddev; hidden layers use `activation`,
    /// the output layer is linear.
    pub fn random(
        dims: &[usize],
        stddev: f64,
        activation: Activation,
        rng: &mut RngState,
    ) -> Result<StochasticNet> {
        if dims.len() < 2 {
            return Err(Error::Config("a network needs at least an input and an output width".into()));
        }
        if !(stddev >= 0.0) || !stddev.is_finite() {
            return Err(Error::Config(format!("weight stddev must be non-negative, got {stddev}")));
        }
        let mut layers = Vec::new();
        for (i, w) in dims.windows(2).enumerate() {
            let act = if i + 2 == dims.len() { Activation::Identity } else { activation };
            layers.push(GaussianWeightLayer::random(w[0], w[1], stddev, act, rng)?);
        }
        StochasticNet::new(layers)
    }

    pub fn layers(&self) -> &[GaussianWeightLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.param_count()).sum()
    }

    /// Flat (means, stddevs) vectors in sampled-parameter order.
    pub(crate) fn flat_distribution(&self) -> (Vec<f64>, Vec<f64>) {
        let mut means = Vec::with_capacity(self.param_count());
        let mut stddevs = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            layer.write_distribution(&mut means, &mut stddevs);
        }
        (means, stddevs)
    }

    /// Number of genuinely stochastic parameters (stddev > 0).
    pub fn stochastic_weight_count(&self) -> usize {
        let (_, stddevs) = self.flat_distribution();
        stddevs.iter().filter(|s| **s > 0.0).count()
    }

    /// Deterministic network at the distribution means.
    pub fn mean_network(&self) -> Mlp {
        let mut hidden = Vec::new();
        for layer in &self.layers[..self.layers.len() - 1] {
            hidden.push(
                DenseLayer::new(layer.weight_mean.clone(), layer.bias_mean.clone(), layer.activation)
                    .expect("validated layer"),
            );
        }
        let last = self.layers.last().unwrap();
        let head = DenseLayer::new(last.weight_mean.clone(), last.bias_mean.clone(), last.activation)
            .expect("validated layer");
        Mlp::new(hidden, Head::Single(head)).expect("validated chaining")
    }
}

/// Draws one deterministic network: every parameter sampled independently
/// from its Gaussian, in flat order (layer by layer, weights then bias).
pub fn sample_weights(net: &StochasticNet, rng: &mut RngState) -> Result<Mlp> {
    let mut sampled = net.mean_network();
    let (means, stddevs) = net.flat_distribution();
    let mut params = vec![0.0; means.len()];
    sample_flat(&means, &stddevs, &mut params, rng);
    sampled.set_params(&params)?;
    Ok(sampled)
}

fn sample_flat(means: &[f64], stddevs: &[f64], out: &mut [f64], rng: &mut RngState) {
    for ((slot, &m), &s) in out.iter_mut().zip(means).zip(stddevs) {
        *slot = rng.normal_with(m, s);
    }
}

/// Monte-Carlo prediction: per-sample outputs plus their empirical mean and
/// (population) variance, each `rows x output_dim`.
#[derive(Debug, Clone)]
pub struct McPrediction {
    pub samples: Vec<Matrix>,
    pub mean: Matrix,
    pub variance: Matrix,
}

pub(crate) fn summarize_samples(samples: Vec<Matrix>) -> McPrediction {
    let n = samples.len() as f64;
    let (rows, cols) = samples[0].shape();
    let mut mean = Matrix::zeros(rows, cols);
    for sample in &samples {
        for (acc, v) in mean.as_mut_slice().iter_mut().zip(sample.as_slice()) {
            *acc += v;
        }
    }
    for v in mean.as_mut_slice() {
        *v /= n;
    }
    let mut variance = Matrix::zeros(rows, cols);
    for sample in &samples {
        for ((acc, v), mu) in variance
            .as_mut_slice()
            .iter_mut()
            .zip(sample.as_slice())
            .zip(mean.as_slice())
        {
            let d = v - mu;
            *acc += d * d;
        }
    }
    for v in variance.as_mut_slice() {
        *v /= n;
    }
    McPrediction { samples, mean, variance }
}

/// Runs `n_samples` forward passes, each through freshly sampled weights.
pub fn stochastic_predict(
    net: &StochasticNet,
    inputs: &Matrix,
    n_samples: usize,
    rng: &mut RngState,
) -> Result<McPrediction> {
    if n_samples == 0 {
        return Err(Error::Config("n_samples must be at least 1".into()));
    }
    let mut scratch = net.mean_network();
    let (means, stddevs) = net.flat_distribution();
    let mut params = vec![0.0; means.len()];
    let mut samples = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        sample_flat(&means, &stddevs, &mut params, rng);
        scratch.set_params(&params)?;
        let output = match scratch.forward(inputs)? {
            crate::nn::Prediction::Values(v) => v,
            _ => unreachable!("mean network is single-headed"),
        };
        samples.push(output);
    }
    Ok(summarize_samples(samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_net(stddev: f64, seed: u64) -> StochasticNet {
        let mut rng = RngState::new(seed);
        StochasticNet::random(&[1, 3, 1], stddev, Activation::Tanh, &mut rng).unwrap()
    }

    #[test]
    fn near_zero_stddev_sampling_recovers_means() {
        let net = tiny_net(1e-12, 1);
        let mut rng = RngState::new(2);
        let sampled = sample_weights(&net, &mut rng).unwrap();
        let (means, _) = net.flat_distribution();
        for (s, m) in sampled.params().iter().zip(&means) {
            assert!((s - m).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_is_deterministic_per_rng_state() {
        let net = tiny_net(0.3, 3);
        let a = sample_weights(&net, &mut RngState::new(9)).unwrap();
        let b = sample_weights(&net, &mut RngState::new(9)).unwrap();
        assert_eq!(a.params(), b.params());
    }

    #[test]
    fn sample_mean_of_one_weight_obeys_clt() {
        // One stochastic scalar weight w ~ N(0.4, 0.25); everything else frozen.
        let layer = GaussianWeightLayer::new(
            Matrix::from_vec(1, 1, vec![0.4]).unwrap(),
            Matrix::from_vec(1, 1, vec![0.5]).unwrap(),
            vec![0.0],
            vec![0.0],
            Activation::Identity,
        )
        .unwrap();
        let net = StochasticNet::new(vec![layer]).unwrap();
        let mut rng = RngState::new(4);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += sample_weights(&net, &mut rng).unwrap().params()[0];
        }
        let mean = sum / n as f64;
        let bound = 4.0 * 0.5 / (n as f64).sqrt();
        assert!((mean - 0.4).abs() < bound, "mean {mean} outside {bound}");
    }

    #[test]
    fn predict_with_frozen_weights_is_deterministic() {
        let net = tiny_net(0.0, 5);
        let x = Matrix::from_vec(2, 1, vec![-0.5, 0.8]).unwrap();
        let mut rng = RngState::new(6);
        let pred = stochastic_predict(&net, &x, 16, &mut rng).unwrap();
        assert!(pred.variance.as_slice().iter().all(|&v| v < 1e-12));
        let baseline = net.mean_network().forward(&x).unwrap();
        for (a, b) in pred.mean.as_slice().iter().zip(baseline.mean().as_slice()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn predict_with_spread_weights_varies() {
        let net = tiny_net(0.5, 7);
        let x = Matrix::from_vec(1, 1, vec![0.7]).unwrap();
        let mut rng = RngState::new(8);
        let pred = stochastic_predict(&net, &x, 64, &mut rng).unwrap();
        assert!(pred.variance.get(0, 0) > 0.0);
        assert_eq!(pred.samples.len(), 64);
    }

    #[test]
    fn zero_samples_rejected() {
        let net = tiny_net(0.1, 10);
        let x = Matrix::from_vec(1, 1, vec![0.0]).unwrap();
        assert!(matches!(
            stochastic_predict(&net, &x, 0, &mut RngState::new(1)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn stochastic_weight_count_ignores_frozen_entries() {
        let layer = GaussianWeightLayer::new(
            Matrix::from_vec(1, 2, vec![0.1, 0.2]).unwrap(),
            Matrix::from_vec(1, 2, vec![0.0, 0.3]).unwrap(),
            vec![0.0],
            vec![0.4],
            Activation::Identity,
        )
        .unwrap();
        let net = StochasticNet::new(vec![layer]).unwrap();
        assert_eq!(net.stochastic_weight_count(), 2);
        assert_eq!(net.param_count(), 3);
    }

    #[test]
    fn negative_stddev_rejected() {
        let err = GaussianWeightLayer::new(
            Matrix::from_vec(1, 1, vec![0.0]).unwrap(),
            Matrix::from_vec(1, 1, vec![-0.1]).unwrap(),
            vec![0.0],
            vec![0.0],
            Activation::Identity,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn mismatched_layer_chaining_rejected() {
        let a = GaussianWeightLayer::random(1, 3, 0.1, Activation::Tanh, &mut RngState::new(1)).unwrap();
        let b = GaussianWeightLayer::random(4, 1, 0.1, Activation::Identity, &mut RngState::new(2)).unwrap();
        assert!(matches!(StochasticNet::new(vec![a, b]), Err(Error::Shape { .. })));
    }
}
