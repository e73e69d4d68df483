//! A fully connected layer with an element-wise activation.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::activation::Activation;
use crate::rng::RngState;

/// Dense layer computing `act(W x + b)` for a column of inputs.
///
/// Weights are stored as an `out_dim x in_dim` matrix so that row `i` holds
/// the incoming weights of output unit `i`.
#[derive(Debug, Clone)]
pub struct DenseLayer {
    weights: Matrix,
    bias: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Vec<f64>, activation: Activation) -> Result<DenseLayer> {
        if bias.len() != weights.rows() {
            return Err(Error::shape(
                "dense layer bias length must equal the weight row count",
                weights.shape(),
                (bias.len(), 1),
            ));
        }
        if bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::Domain("dense layer bias contains a non-finite value".into()));
        }
        Ok(DenseLayer { weights, bias, activation })
    }

    /// Glorot-uniform weights, zero bias. Draws `out_dim * in_dim` uniforms
    /// from `rng` in row-major order.
    pub fn glorot(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut RngState) -> DenseLayer {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let weights = Matrix::from_fn(out_dim, in_dim, |_, _| rng.uniform_in(-limit, limit));
        DenseLayer { weights, bias: vec![0.0; out_dim], activation }
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn param_count(&self) -> usize {
        self.weights.rows() * self.weights.cols() + self.bias.len()
    }

    /// Applies the layer to one input row, writing activations into `out`.
    pub fn forward_row_into(&self, input: &[f64], out: &mut [f64]) {
        debug_assert_eq!(input.len(), self.in_dim());
        debug_assert_eq!(out.len(), self.out_dim());
        for (i, slot) in out.iter_mut().enumerate() {
            let row = self.weights.row(i);
            let mut z = self.bias[i];
            for (w, x) in row.iter().zip(input) {
                z += w * x;
            }
            *slot = self.activation.apply(z);
        }
    }

    /// Copies `weights` (row-major) then `bias` into `out`, returning the
    /// number of values written.
    pub(crate) fn write_params(&self, out: &mut Vec<f64>) -> usize {
        out.extend_from_slice(self.weights.as_slice());
        out.extend_from_slice(&self.bias);
        self.param_count()
    }

    /// Reads parameters back in the order produced by [`write_params`].
    pub(crate) fn read_params(&mut self, src: &[f64]) -> usize {
        let wn = self.weights.rows() * self.weights.cols();
        let bn = self.bias.len();
        self.weights.as_mut_slice().copy_from_slice(&src[..wn]);
        self.bias.copy_from_slice(&src[wn..wn + bn]);
        self.param_count()
    }

    /// Adds one row's weight/bias gradient contribution into a flat buffer
    /// laid out as in [`write_params`]: `d_z` is the gradient at the
    /// pre-activation of this layer, `input` the row it consumed.
    pub(crate) fn accumulate_grad_row(&self, d_z: &[f64], input: &[f64], grad: &mut [f64]) {
        let in_dim = self.in_dim();
        for (i, dz) in d_z.iter().enumerate() {
            let base = i * in_dim;
            for (j, x) in input.iter().enumerate() {
                grad[base + j] += dz * x;
            }
        }
        let bias_base = self.out_dim() * in_dim;
        for (i, dz) in d_z.iter().enumerate() {
            grad[bias_base + i] += dz;
        }
    }

    /// Back-propagates `d_z` through the weights: `d_input = W^T d_z`.
    pub(crate) fn backprop_row(&self, d_z: &[f64], d_input: &mut [f64]) {
        for slot in d_input.iter_mut() {
            *slot = 0.0;
        }
        for (i, dz) in d_z.iter().enumerate() {
            let row = self.weights.row(i);
            for (j, w) in row.iter().enumerate() {
                d_input[j] += w * dz;
            }
        }
    }
}
