//! Fits a plain mean-only network to the noisy sine task and reports how
//! close the learned curve stays to sin(x). This is the baseline every
//! uncertainty-aware model in the other examples improves on: it predicts
//! a single number per input and says nothing about its own confidence.

use uqlab::{mae, sample_toy, train, Activation, Loss, Matrix, Mlp, RngState, ToyRegressionConfig, TrainConfig};

fn main() -> uqlab::Result<()> {
    let base = RngState::new(7);
    let data = sample_toy(&ToyRegressionConfig::default(), &mut base.derive(1))?;

    let mut net = Mlp::single(&[1, 64, 64, 1], Activation::Tanh, Activation::Identity, &mut base.derive(2))?;
    let report = train(&mut net, &data.inputs, &data.targets, &TrainConfig::default(), Loss::Mse)?;
    println!("trained on {} noisy points, final MSE {:.5}", data.inputs.rows(), report.final_loss().unwrap());

    let xs: Vec<f64> = (0..200).map(|i| -3.1 + i as f64 * 0.031).collect();
    let pred = net.forward(&Matrix::column(&xs)?)?;
    let fitted: Vec<f64> = (0..xs.len()).map(|i| pred.mean().get(i, 0)).collect();
    let truth: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
    println!("mean absolute error against sin(x): {:.4}", mae(&fitted, &truth)?);

    // The fit is good where the noise is small (x < 0) and degrades where
    // the noise law sigma(x) = 0.15 sigmoid(x) is largest, but the model
    // itself cannot tell us that.
    for x in [-2.5_f64, 0.0, 2.5] {
        let out = net.forward_row(&[x])?;
        println!("  f({x:>4.1}) = {:>7.4}   sin = {:>7.4}", out[0], x.sin());
    }
    Ok(())
}
