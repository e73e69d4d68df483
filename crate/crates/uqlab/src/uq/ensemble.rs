//! Deep ensembles of two-headed networks: independent training and
//! Gaussian-mixture aggregation into aleatoric/epistemic components.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::{train, Activation, Loss, Mlp, Prediction, TrainConfig};
use crate::rng::RngState;

/// Per-input predictive moments. `total` is `aleatoric + epistemic` by
/// construction, one entry per output dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveSummary {
    pub mean: Vec<f64>,
    pub aleatoric: Vec<f64>,
    pub epistemic: Vec<f64>,
    pub total: Vec<f64>,
}

/// Architecture shared by all ensemble members.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleArch {
    pub hidden: Vec<usize>,
    pub activation: Activation,
}

impl Default for EnsembleArch {
    fn default() -> Self {
        EnsembleArch { hidden: vec![64, 64], activation: Activation::Tanh }
    }
}

#[derive(Debug, Clone)]
pub struct DeepEnsemble {
    members: Vec<Mlp>,
}

impl DeepEnsemble {
    /// Wraps pre-built members; all must be two-headed with matching shapes.
    pub fn from_members(members: Vec<Mlp>) -> Result<DeepEnsemble> {
        if members.len() < 2 {
            return Err(Error::Config(format!(
                "an ensemble needs at least 2 members, got {}",
                members.len()
            )));
        }
        let (in_dim, out_dim) = (members[0].input_dim(), members[0].output_dim());
        for (i, member) in members.iter().enumerate() {
            if !member.is_two_headed() {
                return Err(Error::Config(format!("ensemble member {i} is not two-headed")));
            }
            if member.input_dim() != in_dim || member.output_dim() != out_dim {
                return Err(Error::shape(
                    "ensemble members disagree on input/output width",
                    (in_dim, out_dim),
                    (member.input_dim(), member.output_dim()),
                ));
            }
        }
        Ok(DeepEnsemble { members })
    }

    pub fn members(&self) -> &[Mlp] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Trains `member_count` two-headed networks on the full dataset (no
/// bagging) under the Gaussian negative log-likelihood. Member `i` gets its
/// init and shuffle streams derived from `config.seed`, so results do not
/// depend on scheduling; members run on parallel threads.
pub fn ensemble_train(
    inputs: &Matrix,
    targets: &Matrix,
    member_count: usize,
    arch: &EnsembleArch,
    config: &TrainConfig,
) -> Result<DeepEnsemble> {
    if member_count < 2 {
        return Err(Error::Config(format!(
            "an ensemble needs at least 2 members, got {member_count}"
        )));
    }
    let base = RngState::new(config.seed);
    let streams: Vec<(RngState, u64)> = (0..member_count)
        .map(|i| {
            let init = base.derive(2 * i as u64);
            let train_seed = base.derive(2 * i as u64 + 1).seed();
            (init, train_seed)
        })
        .collect();

    let results: Vec<Result<Mlp>> = std::thread::scope(|scope| {
        let handles: Vec<_> = streams
            .into_iter()
            .map(|(mut init, train_seed)| {
                scope.spawn(move || -> Result<Mlp> {
                    let mut net = Mlp::two_headed(
                        inputs.cols(),
                        &arch.hidden,
                        targets.cols(),
                        arch.activation,
                        &mut init,
                    )?;
                    let member_config = TrainConfig { seed: train_seed, ..config.clone() };
                    train(&mut net, inputs, targets, &member_config, Loss::GaussianNll)?;
                    Ok(net)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("ensemble member thread panicked"))
            .collect()
    });

    let mut members = Vec::with_capacity(member_count);
    for result in results {
        members.push(result?);
    }
    DeepEnsemble::from_members(members)
}

/// Raw per-member predictions, one `(mu, variance)` matrix pair per member
/// in stable member order.
pub fn member_outputs(ensemble: &DeepEnsemble, inputs: &Matrix) -> Result<Vec<(Matrix, Matrix)>> {
    ensemble
        .members()
        .iter()
        .map(|member| match member.forward(inputs)? {
            Prediction::MeanVariance { mu, var } => Ok((mu, var)),
            Prediction::Values(_) => unreachable!("members are validated two-headed"),
        })
        .collect()
}

/// Uniform Gaussian-mixture moment matching, one summary per input row:
/// mean `(1/M) sum mu_i`, aleatoric `(1/M) sum var_i`, epistemic
/// `(1/M) sum mu_i^2 - mean^2` (clamped at zero), total their sum.
pub fn ensemble_predict(ensemble: &DeepEnsemble, inputs: &Matrix) -> Result<Vec<PredictiveSummary>> {
    let outputs = member_outputs(ensemble, inputs)?;
    let m = outputs.len() as f64;
    let out_dim = outputs[0].0.cols();
    let mut summaries = Vec::with_capacity(inputs.rows());
    for r in 0..inputs.rows() {
        let mut mean = vec![0.0; out_dim];
        let mut aleatoric = vec![0.0; out_dim];
        let mut second_moment = vec![0.0; out_dim];
        for (mu, var) in &outputs {
            for k in 0..out_dim {
                mean[k] += mu.get(r, k);
                aleatoric[k] += var.get(r, k);
                second_moment[k] += mu.get(r, k) * mu.get(r, k);
            }
        }
        let mut epistemic = vec![0.0; out_dim];
        let mut total = vec![0.0; out_dim];
        for k in 0..out_dim {
            mean[k] /= m;
            aleatoric[k] /= m;
            epistemic[k] = (second_moment[k] / m - mean[k] * mean[k]).max(0.0);
            total[k] = aleatoric[k] + epistemic[k];
        }
        summaries.push(PredictiveSummary { mean, aleatoric, epistemic, total });
    }
    Ok(summaries)
}
