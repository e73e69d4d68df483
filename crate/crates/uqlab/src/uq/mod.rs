//! Uncertainty estimators: deep ensembles, stochastic-weight networks with
//! Monte-Carlo and quadrature prediction, MC-Dropout and DropConnect.

pub mod dropout;
pub mod ensemble;
pub mod quadrature;
pub mod stochastic;

pub use dropout::{mc_dropconnect_predict, mc_dropout_predict};
pub use ensemble::{ensemble_predict, ensemble_train, member_outputs, DeepEnsemble, EnsembleArch, PredictiveSummary};
pub use quadrature::{predictive_posterior_quadrature, QuadratureSpec};
pub use stochastic::{sample_weights, stochastic_predict, GaussianWeightLayer, McPrediction, StochasticNet};
