//! Feed-forward networks: layers, losses, gradients, and training.

pub mod activation;
pub mod grad;
pub mod layer;
pub mod loss;
pub mod mlp;
pub mod optim;
pub mod train;

pub use activation::{sigmoid, softplus, Activation};
pub use grad::{backward, finite_diff_grad};
pub use layer::DenseLayer;
pub use loss::{evaluate_loss, loss_gaussian_nll, loss_gaussian_nll_batch, loss_mse, Loss};
pub use mlp::{sample_activation_masks, sample_row_mask, Head, Mlp, Prediction, VARIANCE_FLOOR};
pub use optim::OptimizerKind;
pub use train::{train, TrainConfig, TrainReport};
