//! Multi-layer perceptron with either a plain output layer or separate
//! mean and variance heads for heteroscedastic regression.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::activation::{softplus, Activation};
use crate::nn::layer::DenseLayer;
use crate::rng::RngState;

/// Additive floor applied to every predicted variance so the Gaussian
/// likelihood never sees a zero or negative scale.
pub const VARIANCE_FLOOR: f64 = 1e-6;

/// Output stage of an [`Mlp`].
#[derive(Debug, Clone)]
pub enum Head {
    /// One dense layer producing the network output directly.
    Single(DenseLayer),
    /// Two dense layers over the same features: one predicts the mean, the
    /// other a raw value mapped to a variance via `softplus(raw) + floor`.
    /// Both use the identity activation; the softplus is part of the head
    /// contract, not a layer activation.
    Two { mu: DenseLayer, raw_var: DenseLayer },
}

/// Batch prediction, shaped `n x output_dim` per field.
#[derive(Debug, Clone)]
pub enum Prediction {
    Values(Matrix),
    MeanVariance { mu: Matrix, var: Matrix },
}

impl Prediction {
    /// The mean-like output: `Values` for single-head nets, `mu` otherwise.
    pub fn mean(&self) -> &Matrix {
        match self {
            Prediction::Values(v) => v,
            Prediction::MeanVariance { mu, .. } => mu,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Mlp {
    hidden: Vec<DenseLayer>,
    head: Head,
}

impl Mlp {
    pub fn new(hidden: Vec<DenseLayer>, head: Head) -> Result<Mlp> {
        let mut prev: Option<usize> = None;
        for layer in &hidden {
            if let Some(d) = prev {
                if layer.in_dim() != d {
                    return Err(Error::shape(
                        "hidden layers do not chain",
                        (d, 1),
                        (layer.in_dim(), 1),
                    ));
                }
            }
            prev = Some(layer.out_dim());
        }
        let feature_dim = |layer: &DenseLayer| -> Result<()> {
            if let Some(d) = prev {
                if layer.in_dim() != d {
                    return Err(Error::shape(
                        "head input width does not match the last hidden layer",
                        (d, 1),
                        (layer.in_dim(), 1),
                    ));
                }
            }
            Ok(())
        };
        match &head {
            Head::Single(layer) => feature_dim(layer)?,
            Head::Two { mu, raw_var } => {
                feature_dim(mu)?;
                feature_dim(raw_var)?;
                if mu.out_dim() != raw_var.out_dim() {
                    return Err(Error::shape(
                        "mean and variance heads must have equal width",
                        (mu.out_dim(), 1),
                        (raw_var.out_dim(), 1),
                    ));
                }
                if mu.activation() != Activation::Identity || raw_var.activation() != Activation::Identity {
                    return Err(Error::Config(
                        "two-headed networks require identity activations on both heads".into(),
                    ));
                }
            }
        }
        Ok(Mlp { hidden, head })
    }

    /// Glorot-initialized single-head network. `dims` lists every width from
    /// input to output, e.g. `[1, 64, 64, 1]`.
    pub fn single(
        dims: &[usize],
        hidden_activation: Activation,
        output_activation: Activation,
        rng: &mut RngState,
    ) -> Result<Mlp> {
        if dims.len() < 2 {
            return Err(Error::Config("a network needs at least an input and an output width".into()));
        }
        let mut hidden = Vec::new();
        for w in dims.windows(2).take(dims.len() - 2) {
            hidden.push(DenseLayer::glorot(w[0], w[1], hidden_activation, rng));
        }
        let last = dims.len() - 2;
        let head = DenseLayer::glorot(dims[last], dims[last + 1], output_activation, rng);
        Mlp::new(hidden, Head::Single(head))
    }

    /// Glorot-initialized network with mean and raw-variance heads.
    pub fn two_headed(
        input: usize,
        hidden_dims: &[usize],
        output: usize,
        hidden_activation: Activation,
        rng: &mut RngState,
    ) -> Result<Mlp> {
        let mut hidden = Vec::new();
        let mut prev = input;
        for &w in hidden_dims {
            hidden.push(DenseLayer::glorot(prev, w, hidden_activation, rng));
            prev = w;
        }
        let mu = DenseLayer::glorot(prev, output, Activation::Identity, rng);
        let raw_var = DenseLayer::glorot(prev, output, Activation::Identity, rng);
        Mlp::new(hidden, Head::Two { mu, raw_var })
    }

    pub fn input_dim(&self) -> usize {
        match self.hidden.first() {
            Some(layer) => layer.in_dim(),
            None => match &self.head {
                Head::Single(layer) => layer.in_dim(),
                Head::Two { mu, .. } => mu.in_dim(),
            },
        }
    }

    pub fn output_dim(&self) -> usize {
        match &self.head {
            Head::Single(layer) => layer.out_dim(),
            Head::Two { mu, .. } => mu.out_dim(),
        }
    }

    pub fn hidden_dims(&self) -> Vec<usize> {
        self.hidden.iter().map(|l| l.out_dim()).collect()
    }

    pub fn hidden_layers(&self) -> &[DenseLayer] {
        &self.hidden
    }

    pub fn head(&self) -> &Head {
        &self.head
    }

    pub fn is_two_headed(&self) -> bool {
        matches!(self.head, Head::Two { .. })
    }

    pub fn param_count(&self) -> usize {
        let mut n: usize = self.hidden.iter().map(|l| l.param_count()).sum();
        n += match &self.head {
            Head::Single(layer) => layer.param_count(),
            Head::Two { mu, raw_var } => mu.param_count() + raw_var.param_count(),
        };
        n
    }

    /// Flattens all parameters: each hidden layer's weights (row-major) then
    /// bias, followed by the head (mean head before the raw-variance head).
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.hidden {
            layer.write_params(&mut out);
        }
        match &self.head {
            Head::Single(layer) => {
                layer.write_params(&mut out);
            }
            Head::Two { mu, raw_var } => {
                mu.write_params(&mut out);
                raw_var.write_params(&mut out);
            }
        }
        out
    }

    /// Writes back a flat vector in the order produced by [`params`].
    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::shape(
                "flat parameter vector has the wrong length",
                (self.param_count(), 1),
                (flat.len(), 1),
            ));
        }
        let mut offset = 0;
        for layer in &mut self.hidden {
            offset += layer.read_params(&flat[offset..]);
        }
        match &mut self.head {
            Head::Single(layer) => {
                offset += layer.read_params(&flat[offset..]);
            }
            Head::Two { mu, raw_var } => {
                offset += mu.read_params(&flat[offset..]);
                offset += raw_var.read_params(&flat[offset..]);
            }
        }
        debug_assert_eq!(offset, flat.len());
        Ok(())
    }

    fn check_input(&self, inputs: &Matrix) -> Result<()> {
        if inputs.cols() != self.input_dim() {
            return Err(Error::shape(
                "input width does not match the network",
                (inputs.rows(), self.input_dim()),
                inputs.shape(),
            ));
        }
        Ok(())
    }

    /// Runs the whole batch through the network.
    pub fn forward(&self, inputs: &Matrix) -> Result<Prediction> {
        self.forward_masked(inputs, None)
    }

    /// Batch forward with optional per-row multiplicative masks on hidden
    /// activations; `masks[l]` must be `n x hidden_dims[l]`. Used by dropout.
    pub fn forward_masked(&self, inputs: &Matrix, masks: Option<&[Matrix]>) -> Result<Prediction> {
        self.check_input(inputs)?;
        if let Some(masks) = masks {
            self.check_masks(masks, inputs.rows())?;
        }
        let n = inputs.rows();
        let out_dim = self.output_dim();
        let mut feature = vec![0.0; self.input_dim().max(1)];
        let mut scratch = vec![0.0; self.max_hidden_dim().max(out_dim)];
        let mut prediction = match &self.head {
            Head::Single(_) => Prediction::Values(Matrix::zeros(n, out_dim)),
            Head::Two { .. } => Prediction::MeanVariance {
                mu: Matrix::zeros(n, out_dim),
                var: Matrix::zeros(n, out_dim),
            },
        };
        for r in 0..n {
            feature.clear();
            feature.extend_from_slice(inputs.row(r));
            for (l, layer) in self.hidden.iter().enumerate() {
                scratch.resize(layer.out_dim(), 0.0);
                layer.forward_row_into(&feature, &mut scratch[..layer.out_dim()]);
                if let Some(masks) = masks {
                    for (v, m) in scratch[..layer.out_dim()].iter_mut().zip(masks[l].row(r)) {
                        *v *= m;
                    }
                }
                feature.clear();
                feature.extend_from_slice(&scratch[..layer.out_dim()]);
            }
            match (&self.head, &mut prediction) {
                (Head::Single(layer), Prediction::Values(values)) => {
                    layer.forward_row_into(&feature, values.row_mut(r));
                }
                (Head::Two { mu: mu_layer, raw_var }, Prediction::MeanVariance { mu, var }) => {
                    mu_layer.forward_row_into(&feature, mu.row_mut(r));
                    raw_var.forward_row_into(&feature, var.row_mut(r));
                    for v in var.row_mut(r) {
                        *v = softplus(*v) + VARIANCE_FLOOR;
                    }
                }
                _ => unreachable!(),
            }
        }
        let finite = match &prediction {
            Prediction::Values(v) => v.is_finite(),
            Prediction::MeanVariance { mu, var } => mu.is_finite() && var.is_finite(),
        };
        if !finite {
            return Err(Error::Domain("network produced a non-finite output".into()));
        }
        Ok(prediction)
    }

    /// Single-row forward for single-head networks; the fast path for
    /// Monte-Carlo sampling loops.
    pub fn forward_row(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.forward_row_masked(input, None)
    }

    /// Like [`forward_row`] with per-layer multiplicative factors on hidden
    /// activations (`factors[l].len() == hidden_dims[l]`).
    pub fn forward_row_masked(&self, input: &[f64], factors: Option<&[Vec<f64>]>) -> Result<Vec<f64>> {
        let head = match &self.head {
            Head::Single(layer) => layer,
            Head::Two { .. } => {
                return Err(Error::Config(
                    "row-wise forward expects a single-head network; use the batch forward for two-headed nets"
                        .into(),
                ))
            }
        };
        if input.len() != self.input_dim() {
            return Err(Error::shape(
                "input width does not match the network",
                (1, self.input_dim()),
                (1, input.len()),
            ));
        }
        if let Some(factors) = factors {
            if factors.len() != self.hidden.len()
                || factors
                    .iter()
                    .zip(&self.hidden)
                    .any(|(f, l)| f.len() != l.out_dim())
            {
                return Err(Error::Config("mask factors do not match the hidden layout".into()));
            }
        }
        let mut feature = input.to_vec();
        let mut scratch = vec![0.0; self.max_hidden_dim().max(head.out_dim())];
        for (l, layer) in self.hidden.iter().enumerate() {
            layer.forward_row_into(&feature, &mut scratch[..layer.out_dim()]);
            if let Some(factors) = factors {
                for (v, m) in scratch[..layer.out_dim()].iter_mut().zip(&factors[l]) {
                    *v *= m;
                }
            }
            feature.clear();
            feature.extend_from_slice(&scratch[..layer.out_dim()]);
        }
        let mut out = vec![0.0; head.out_dim()];
        head.forward_row_into(&feature, &mut out);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("network produced a non-finite output".into()));
        }
        Ok(out)
    }

    pub(crate) fn max_hidden_dim(&self) -> usize {
        self.hidden.iter().map(|l| l.out_dim()).max().unwrap_or(0)
    }

    pub(crate) fn check_masks(&self, masks: &[Matrix], n_rows: usize) -> Result<()> {
        if masks.len() != self.hidden.len() {
            return Err(Error::Config(format!(
                "expected one mask per hidden layer ({}), got {}",
                self.hidden.len(),
                masks.len()
            )));
        }
        for (mask, layer) in masks.iter().zip(&self.hidden) {
            if mask.shape() != (n_rows, layer.out_dim()) {
                return Err(Error::shape(
                    "activation mask shape does not match the layer",
                    (n_rows, layer.out_dim()),
                    mask.shape(),
                ));
            }
        }
        Ok(())
    }
}

/// Draws inverted-dropout factors for every hidden unit of every row:
/// each entry is `0` with probability `rate`, else `1 / (1 - rate)`.
pub fn sample_activation_masks(net: &Mlp, n_rows: usize, rate: f64, rng: &mut RngState) -> Result<Vec<Matrix>> {
    check_dropout_rate(rate)?;
    let keep = 1.0 / (1.0 - rate);
    Ok(net
        .hidden_layers()
        .iter()
        .map(|layer| {
            Matrix::from_fn(n_rows, layer.out_dim(), |_, _| {
                if rng.bernoulli(rate) {
                    0.0
                } else {
                    keep
                }
            })
        })
        .collect())
}

/// Row-level variant of [`sample_activation_masks`] for per-sample loops.
pub fn sample_row_mask(net: &Mlp, rate: f64, rng: &mut RngState) -> Result<Vec<Vec<f64>>> {
    check_dropout_rate(rate)?;
    let keep = 1.0 / (1.0 - rate);
    Ok(net
        .hidden_layers()
        .iter()
        .map(|layer| {
            (0..layer.out_dim())
                .map(|_| if rng.bernoulli(rate) { 0.0 } else { keep })
                .collect()
        })
        .collect())
}

pub(crate) fn check_dropout_rate(rate: f64) -> Result<()> {
    if !rate.is_finite() || !(0.0..1.0).contains(&rate) {
        return Err(Error::Config(format!(
            "dropout rate must lie in [0, 1), got {rate}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_two_headed() -> Mlp {
        let mut rng = RngState::new(11);
        Mlp::two_headed(1, &[4], 1, Activation::Tanh, &mut rng).unwrap()
    }

    #[test]
    fn forward_shapes_match_batch() {
        let net = tiny_two_headed();
        let x = Matrix::from_vec(3, 1, vec![-1.0, 0.0, 1.0]).unwrap();
        match net.forward(&x).unwrap() {
            Prediction::MeanVariance { mu, var } => {
                assert_eq!(mu.shape(), (3, 1));
                assert_eq!(var.shape(), (3, 1));
                assert!(var.as_slice().iter().all(|&v| v >= VARIANCE_FLOOR));
            }
            _ => panic!("expected mean/variance output"),
        }
    }

    #[test]
    fn variance_head_applies_softplus_plus_floor() {
        // Zero weights make the raw head output its bias exactly.
        let hidden: Vec<DenseLayer> = Vec::new();
        let mu = DenseLayer::new(Matrix::zeros(1, 1), vec![0.5], Activation::Identity).unwrap();
        let raw = DenseLayer::new(Matrix::zeros(1, 1), vec![-2.0], Activation::Identity).unwrap();
        let net = Mlp::new(hidden, Head::Two { mu, raw_var: raw }).unwrap();
        let x = Matrix::from_vec(1, 1, vec![3.0]).unwrap();
        match net.forward(&x).unwrap() {
            Prediction::MeanVariance { mu, var } => {
                assert_eq!(mu.get(0, 0), 0.5);
                let expected = softplus(-2.0) + VARIANCE_FLOOR;
                assert!((var.get(0, 0) - expected).abs() < 1e-15);
            }
            _ => panic!("expected mean/variance output"),
        }
    }

    #[test]
    fn forward_row_agrees_with_batch_forward() {
        let mut rng = RngState::new(4);
        let net = Mlp::single(&[2, 8, 3], Activation::Tanh, Activation::Identity, &mut rng).unwrap();
        let x = Matrix::from_vec(2, 2, vec![0.3, -0.7, 1.1, 0.2]).unwrap();
        let batch = match net.forward(&x).unwrap() {
            Prediction::Values(v) => v,
            _ => unreachable!(),
        };
        for r in 0..2 {
            let row = net.forward_row(x.row(r)).unwrap();
            assert_eq!(row.as_slice(), batch.row(r));
        }
    }

    #[test]
    fn param_roundtrip_is_identity() {
        let mut net = tiny_two_headed();
        let flat = net.params();
        assert_eq!(flat.len(), net.param_count());
        let mut shifted = flat.clone();
        for v in shifted.iter_mut() {
            *v += 0.25;
        }
        net.set_params(&shifted).unwrap();
        assert_eq!(net.params(), shifted);
    }

    #[test]
    fn param_count_matches_dense_formula() {
        let mut rng = RngState::new(0);
        // 1 -> 16 -> 16 -> 1: (1*16+16) + (16*16+16) + (16*1+1) = 321
        let net = Mlp::single(&[1, 16, 16, 1], Activation::Relu, Activation::Identity, &mut rng).unwrap();
        assert_eq!(net.param_count(), 321);
    }

    #[test]
    fn mismatched_input_width_is_a_shape_error() {
        let net = tiny_two_headed();
        let x = Matrix::zeros(2, 3);
        assert!(matches!(net.forward(&x).unwrap_err(), Error::Shape { .. }));
    }

    #[test]
    fn row_forward_rejects_two_headed_nets() {
        let net = tiny_two_headed();
        assert!(matches!(net.forward_row(&[0.0]).unwrap_err(), Error::Config(_)));
    }

    #[test]
    fn masks_scale_hidden_activations() {
        let mut rng = RngState::new(7);
        let net = Mlp::single(&[1, 3, 1], Activation::Identity, Activation::Identity, &mut rng).unwrap();
        let x = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let ones = vec![Matrix::from_fn(1, 3, |_, _| 1.0)];
        let zeros = vec![Matrix::zeros(1, 3)];
        let plain = net.forward(&x).unwrap().mean().get(0, 0);
        let masked_one = net.forward_masked(&x, Some(&ones)).unwrap().mean().get(0, 0);
        let masked_zero = net.forward_masked(&x, Some(&zeros)).unwrap().mean().get(0, 0);
        assert_eq!(plain, masked_one);
        // With all hidden units off, only the head bias (zero) remains.
        assert_eq!(masked_zero, 0.0);
    }

    #[test]
    fn dropout_rate_validation() {
        let net = tiny_two_headed();
        let mut rng = RngState::new(1);
        assert!(sample_activation_masks(&net, 4, 1.0, &mut rng).is_err());
        assert!(sample_activation_masks(&net, 4, -0.1, &mut rng).is_err());
        assert!(sample_activation_masks(&net, 4, 0.0, &mut rng).is_ok());
    }
}
