//! Mini-batch training with shuffled epochs and divergence detection.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::grad::{check_training_shapes, loss_and_grad_masked};
use crate::nn::loss::Loss;
use crate::nn::mlp::{sample_activation_masks, Mlp};
use crate::nn::optim::{Optimizer, OptimizerKind};
use crate::rng::RngState;

/// Stream tag so dropout-mask draws never perturb the shuffle sequence.
const MASK_STREAM_TAG: u64 = 0x6d61_736b;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Seeds the per-epoch shuffle and any dropout masks; independent of the
    /// seed used to initialize the network.
    pub seed: u64,
    pub optimizer: OptimizerKind,
    /// When set, hidden activations are dropped at this rate during training
    /// (inverted scaling, so inference needs no correction).
    pub dropout_rate: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            epochs: 200,
            batch_size: 64,
            seed: 0,
            optimizer: OptimizerKind::adam_default(),
            dropout_rate: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Mean training loss per epoch, one entry per epoch, measured on the
    /// batches as they were seen (before each update).
    pub loss_history: Vec<f64>,
}

impl TrainReport {
    pub fn final_loss(&self) -> Option<f64> {
        self.loss_history.last().copied()
    }
}

/// Trains the network in place. Losses are checked per batch; the first
/// non-finite value aborts with the epoch it appeared in.
pub fn train(net: &mut Mlp, inputs: &Matrix, targets: &Matrix, config: &TrainConfig, loss: Loss) -> Result<TrainReport> {
    check_training_shapes(net, inputs, targets, loss)?;
    if !(config.learning_rate > 0.0) || !config.learning_rate.is_finite() {
        return Err(Error::Config(format!(
            "learning rate must be positive and finite, got {}",
            config.learning_rate
        )));
    }
    if config.batch_size == 0 {
        return Err(Error::Config("batch size must be at least 1".into()));
    }
    if config.batch_size > inputs.rows() {
        return Err(Error::Config(format!(
            "batch size {} exceeds the dataset size {}",
            config.batch_size,
            inputs.rows()
        )));
    }
    if let Some(rate) = config.dropout_rate {
        crate::nn::mlp::check_dropout_rate(rate)?;
    }

    let n = inputs.rows();
    let mut shuffle_rng = RngState::new(config.seed);
    let mut mask_rng = shuffle_rng.derive(MASK_STREAM_TAG);
    let mut optimizer = Optimizer::new(config.optimizer, net.param_count());
    let mut params = net.params();
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        shuffle_rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch_x = Matrix::from_fn(chunk.len(), inputs.cols(), |r, c| inputs.get(chunk[r], c));
            let batch_y = Matrix::from_fn(chunk.len(), targets.cols(), |r, c| targets.get(chunk[r], c));
            let masks = match config.dropout_rate {
                Some(rate) if rate > 0.0 => {
                    Some(sample_activation_masks(net, chunk.len(), rate, &mut mask_rng)?)
                }
                _ => None,
            };
            let (batch_loss, grad) = loss_and_grad_masked(net, &batch_x, &batch_y, loss, masks.as_deref())?;
            if !batch_loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch, loss: batch_loss });
            }
            epoch_loss += batch_loss * chunk.len() as f64;
            optimizer.step(&mut params, &grad, config.learning_rate);
            net.set_params(&params)?;
        }
        history.push(epoch_loss / n as f64);
    }
    Ok(TrainReport { loss_history: history })
}
