//! Trains a deep ensemble of two-headed networks under the Gaussian
//! negative log-likelihood and prints the decomposed predictive
//! uncertainty at a few probe inputs. Each member predicts a mean and a
//! variance; the ensemble mixes them into aleatoric (data noise) and
//! epistemic (model disagreement) parts.

use uqlab::{
    ensemble_predict, ensemble_train, sample_toy, EnsembleArch, Matrix, RngState,
    ToyRegressionConfig, TrainConfig,
};

fn main() -> uqlab::Result<()> {
    let data = sample_toy(&ToyRegressionConfig::default(), &mut RngState::new(7).derive(1))?;

    let config = TrainConfig { seed: 7, ..TrainConfig::default() };
    let ensemble = ensemble_train(&data.inputs, &data.targets, 5, &EnsembleArch::default(), &config)?;
    println!("trained {} members on {} points\n", ensemble.len(), data.inputs.rows());

    // Inside the training range the noise law dominates; outside it the
    // members have nothing to agree on and the epistemic part takes over.
    let probes = [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0];
    let summaries = ensemble_predict(&ensemble, &Matrix::column(&probes)?)?;
    println!("{:>6}  {:>8}  {:>8}  {:>11}  {:>11}", "x", "mean", "sin(x)", "sigma_ale", "sigma_epi");
    for (x, s) in probes.iter().zip(&summaries) {
        println!(
            "{x:>6.1}  {:>8.4}  {:>8.4}  {:>11.4}  {:>11.4}",
            s.mean[0],
            x.sin(),
            s.aleatoric[0].sqrt(),
            s.epistemic[0].sqrt(),
        );
    }
    Ok(())
}
