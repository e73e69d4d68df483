//! Monte-Carlo dropout and DropConnect as cheap posterior approximations:
//! keep the stochastic masks active at prediction time and read the spread
//! of the outputs as uncertainty. Both need only one trained network, in
//! contrast to the five of a deep ensemble.

use uqlab::{
    mc_dropconnect_predict, mc_dropout_predict, sample_toy, train, Activation, Loss, Matrix, Mlp,
    RngState, ToyRegressionConfig, TrainConfig,
};

fn main() -> uqlab::Result<()> {
    let base = RngState::new(7);
    let data = sample_toy(&ToyRegressionConfig::default(), &mut base.derive(1))?;

    // Train WITH dropout so prediction-time masks sample functions the
    // optimizer actually visited.
    let mut net = Mlp::single(&[1, 64, 64, 1], Activation::Tanh, Activation::Identity, &mut base.derive(2))?;
    let config = TrainConfig { dropout_rate: Some(0.1), seed: 7, ..TrainConfig::default() };
    train(&mut net, &data.inputs, &data.targets, &config, Loss::Mse)?;

    let probes = [-6.0, -3.0, 0.0, 3.0, 6.0];
    let inputs = Matrix::column(&probes)?;
    let dropout = mc_dropout_predict(&net, &inputs, 0.1, 500, &mut base.derive(3))?;
    let dropconnect = mc_dropconnect_predict(&net, &inputs, 0.1, 500, &mut base.derive(4))?;

    println!("{:>6}  {:>9}  {:>12}  {:>15}", "x", "mc_mean", "dropout_std", "dropconnect_std");
    for (i, x) in probes.iter().enumerate() {
        println!(
            "{x:>6.1}  {:>9.4}  {:>12.4}  {:>15.4}",
            dropout.mean.get(i, 0),
            dropout.variance.get(i, 0).sqrt(),
            dropconnect.variance.get(i, 0).sqrt(),
        );
    }
    println!("\nboth spreads grow away from the training range [-pi, pi],");
    println!("where the subnetworks were never forced to agree.");
    Ok(())
}
