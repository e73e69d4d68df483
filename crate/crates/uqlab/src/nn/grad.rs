//! Reverse-mode gradients for [`Mlp`] training, plus a central
//! finite-difference reference used to validate them.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::activation::sigmoid;
use crate::nn::loss::{evaluate_loss, Loss};
use crate::nn::mlp::{Head, Mlp, VARIANCE_FLOOR};
use crate::nn::activation::softplus;

pub(crate) fn check_training_shapes(net: &Mlp, inputs: &Matrix, targets: &Matrix, loss: Loss) -> Result<()> {
    if inputs.cols() != net.input_dim() {
        return Err(Error::shape(
            "input width does not match the network",
            (inputs.rows(), net.input_dim()),
            inputs.shape(),
        ));
    }
    if targets.rows() != inputs.rows() || targets.cols() != net.output_dim() {
        return Err(Error::shape(
            "target shape does not match inputs and network output",
            (inputs.rows(), net.output_dim()),
            targets.shape(),
        ));
    }
    match loss {
        Loss::Mse if net.is_two_headed() => {
            Err(Error::Config("mse loss requires a single-head network".into()))
        }
        Loss::GaussianNll if !net.is_two_headed() => {
            Err(Error::Config("gaussian_nll loss requires a two-headed network".into()))
        }
        _ => Ok(()),
    }
}

/// Batch loss and flat gradient in one pass. The gradient is laid out
/// exactly like [`Mlp::params`]. Non-finite losses are returned as-is so
/// the trainer can report divergence instead of a generic domain error.
pub(crate) fn loss_and_grad_masked(
    net: &Mlp,
    inputs: &Matrix,
    targets: &Matrix,
    loss: Loss,
    masks: Option<&[Matrix]>,
) -> Result<(f64, Vec<f64>)> {
    check_training_shapes(net, inputs, targets, loss)?;
    if let Some(masks) = masks {
        net.check_masks(masks, inputs.rows())?;
    }

    let n = inputs.rows();
    let out_dim = net.output_dim();
    let total = (n * out_dim) as f64;
    let layers = net.hidden_layers();
    let depth = layers.len();

    // Flat offsets mirroring Mlp::params.
    let mut offsets = Vec::with_capacity(depth + 2);
    let mut cursor = 0;
    for layer in layers {
        offsets.push(cursor);
        cursor += layer.param_count();
    }
    let head_offset = cursor;
    let mut grad = vec![0.0; net.param_count()];

    // layer_inputs[0] is the input row; layer_inputs[l + 1] is what layer l
    // fed forward (post-activation, post-mask).
    let mut layer_inputs: Vec<Vec<f64>> = Vec::with_capacity(depth + 1);
    layer_inputs.push(vec![0.0; net.input_dim()]);
    for layer in layers {
        layer_inputs.push(vec![0.0; layer.out_dim()]);
    }
    let mut post_act: Vec<Vec<f64>> = layers.iter().map(|l| vec![0.0; l.out_dim()]).collect();

    let width = net
        .max_hidden_dim()
        .max(net.input_dim())
        .max(out_dim);
    let mut d_feature = vec![0.0; width];
    let mut d_extra = vec![0.0; width];
    let mut d_z = vec![0.0; width];
    let mut head_a = vec![0.0; out_dim];
    let mut head_b = vec![0.0; out_dim];

    let mut loss_sum = 0.0;
    for r in 0..n {
        layer_inputs[0].copy_from_slice(inputs.row(r));
        for l in 0..depth {
            let (before, after) = layer_inputs.split_at_mut(l + 1);
            layers[l].forward_row_into(&before[l], &mut post_act[l]);
            after[0].copy_from_slice(&post_act[l]);
            if let Some(masks) = masks {
                for (v, m) in after[0].iter_mut().zip(masks[l].row(r)) {
                    *v *= m;
                }
            }
        }
        let feature = &layer_inputs[depth];
        let target = targets.row(r);

        let feature_dim = feature.len();
        match net.head() {
            Head::Single(layer) => {
                layer.forward_row_into(feature, &mut head_a);
                for k in 0..out_dim {
                    let diff = head_a[k] - target[k];
                    loss_sum += diff * diff;
                    d_z[k] = 2.0 * diff / total * layer.activation().grad_from_output(head_a[k]);
                }
                layer.accumulate_grad_row(&d_z[..out_dim], feature, &mut grad[head_offset..]);
                layer.backprop_row(&d_z[..out_dim], &mut d_feature[..feature_dim]);
            }
            Head::Two { mu, raw_var } => {
                mu.forward_row_into(feature, &mut head_a);
                raw_var.forward_row_into(feature, &mut head_b);
                // d_z reused for the mean head, d_extra's prefix for the raw head.
                for k in 0..out_dim {
                    let raw = head_b[k];
                    let var = softplus(raw) + VARIANCE_FLOOR;
                    let diff = head_a[k] - target[k];
                    loss_sum += 0.5 * var.ln() + diff * diff / (2.0 * var);
                    d_z[k] = diff / var / total;
                    d_extra[k] = (0.5 / var - diff * diff / (2.0 * var * var)) * sigmoid(raw) / total;
                }
                let mu_offset = head_offset;
                let raw_offset = head_offset + mu.param_count();
                mu.accumulate_grad_row(&d_z[..out_dim], feature, &mut grad[mu_offset..raw_offset]);
                raw_var.accumulate_grad_row(&d_extra[..out_dim], feature, &mut grad[raw_offset..]);
                mu.backprop_row(&d_z[..out_dim], &mut d_feature[..feature_dim]);
                let mut d_raw_feature = vec![0.0; feature_dim];
                raw_var.backprop_row(&d_extra[..out_dim], &mut d_raw_feature);
                for (a, b) in d_feature[..feature_dim].iter_mut().zip(&d_raw_feature) {
                    *a += b;
                }
            }
        }

        for l in (0..depth).rev() {
            let layer = &layers[l];
            let dim = layer.out_dim();
            for k in 0..dim {
                let mut d = d_feature[k];
                if let Some(masks) = masks {
                    d *= masks[l].get(r, k);
                }
                d_z[k] = d * layer.activation().grad_from_output(post_act[l][k]);
            }
            let end = offsets[l] + layer.param_count();
            layer.accumulate_grad_row(&d_z[..dim], &layer_inputs[l], &mut grad[offsets[l]..end]);
            let in_dim = layer.in_dim();
            layer.backprop_row(&d_z[..dim], &mut d_extra[..in_dim]);
            d_feature[..in_dim].copy_from_slice(&d_extra[..in_dim]);
        }
    }

    Ok((loss_sum / total, grad))
}

/// Analytic gradient of `loss` over the batch, flattened like
/// [`Mlp::params`].
pub fn backward(net: &Mlp, inputs: &Matrix, targets: &Matrix, loss: Loss) -> Result<Vec<f64>> {
    let (value, grad) = loss_and_grad_masked(net, inputs, targets, loss, None)?;
    if !value.is_finite() {
        return Err(Error::Domain(format!(
            "cannot differentiate a non-finite loss ({value})"
        )));
    }
    Ok(grad)
}

pub(crate) fn loss_masked(
    net: &Mlp,
    inputs: &Matrix,
    targets: &Matrix,
    loss: Loss,
    masks: Option<&[Matrix]>,
) -> Result<f64> {
    let prediction = net.forward_masked(inputs, masks)?;
    evaluate_loss(&prediction, targets, loss)
}

pub(crate) fn finite_diff_grad_masked(
    net: &Mlp,
    inputs: &Matrix,
    targets: &Matrix,
    loss: Loss,
    step: f64,
    masks: Option<&[Matrix]>,
) -> Result<Vec<f64>> {
    check_training_shapes(net, inputs, targets, loss)?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Config(format!(
            "finite-difference step must be positive and finite, got {step}"
        )));
    }
    let mut probe = net.clone();
    let base = net.params();
    let mut shifted = base.clone();
    let mut grad = vec![0.0; base.len()];
    for i in 0..base.len() {
        shifted[i] = base[i] + step;
        probe.set_params(&shifted)?;
        let up = loss_masked(&probe, inputs, targets, loss, masks)?;
        shifted[i] = base[i] - step;
        probe.set_params(&shifted)?;
        let down = loss_masked(&probe, inputs, targets, loss, masks)?;
        shifted[i] = base[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    Ok(grad)
}

/// Central finite-difference gradient, the slow reference for [`backward`].
pub fn finite_diff_grad(net: &Mlp, inputs: &Matrix, targets: &Matrix, loss: Loss, step: f64) -> Result<Vec<f64>> {
    finite_diff_grad_masked(net, inputs, targets, loss, step, None)
}
