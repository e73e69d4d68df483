//! Small, dependency-light toolkit for studying predictive uncertainty in
//! neural networks: heteroscedastic regression, deep ensembles,
//! stochastic-weight networks, Monte-Carlo dropout, and the evaluation
//! metrics that go with them.
//!
//! Everything is driven by an explicit, reproducible random-number state;
//! two runs with the same seeds produce bit-identical results.

pub mod bench;
pub mod data;
pub mod error;
pub mod experiment;
pub mod matrix;
pub mod metrics;
pub mod nn;
pub mod rng;
pub mod uq;

pub use bench::{
    dense_param_count, emit_scaling_report, parse_scaling_report, run_scaling,
    sample_axis_inversions, width_scaling_slope, ScalingConfig, ScalingRecord,
};
pub use data::{
    load_idx, noise_sigma, ood_regression_split, sample_clusters, sample_toy, ClusterConfig,
    LabeledSet, SetTag, ToyRegressionConfig,
};
pub use error::{Error, Result};
pub use experiment::{
    config_from_args, run_experiment, ExperimentConfig, RunArtifacts, UseCase,
    BENCH_BUDGET_ENV_VAR,
};
pub use matrix::Matrix;
pub use metrics::{
    brier, entropy, histogram, mae, reliability, rmse, roc, spearman, Histogram, ReliabilityBin,
    ReliabilityReport, RocCurve,
};
pub use nn::{
    backward, finite_diff_grad, loss_gaussian_nll, loss_mse, train, Activation, DenseLayer, Head,
    Loss, Mlp, OptimizerKind, Prediction, TrainConfig, TrainReport, VARIANCE_FLOOR,
};
pub use rng::RngState;
pub use uq::{
    ensemble_predict, ensemble_train, mc_dropconnect_predict, mc_dropout_predict, member_outputs,
    predictive_posterior_quadrature, sample_weights, stochastic_predict, DeepEnsemble, EnsembleArch,
    GaussianWeightLayer, McPrediction, PredictiveSummary, QuadratureSpec, StochasticNet,
};
