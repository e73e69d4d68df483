//! Treats a network's weights as Gaussian random variables and predicts by
//! sampling whole networks. Every draw is a different plausible function;
//! their spread at an input is the model's predictive uncertainty there.

use uqlab::{stochastic_predict, Activation, Matrix, RngState, StochasticNet};

fn main() -> uqlab::Result<()> {
    let base = RngState::new(7);
    let net = StochasticNet::random(&[1, 16, 16, 1], 0.1, Activation::Tanh, &mut base.derive(1))?;
    println!(
        "stochastic network: {} parameters, {} of them random",
        net.param_count(),
        net.stochastic_weight_count()
    );

    let xs = [-3.0, -1.5, 0.0, 1.5, 3.0];
    let pred = stochastic_predict(&net, &Matrix::column(&xs)?, 2000, &mut base.derive(2))?;

    // The mean-weight network is one deterministic member of the family;
    // the Monte-Carlo mean need not equal it because the network is
    // nonlinear in its weights.
    let deterministic = net.mean_network().forward(&Matrix::column(&xs)?)?;
    println!("\n{:>6}  {:>9}  {:>9}  {:>9}", "x", "mc_mean", "mc_std", "mean_net");
    for (i, x) in xs.iter().enumerate() {
        println!(
            "{x:>6.1}  {:>9.4}  {:>9.4}  {:>9.4}",
            pred.mean.get(i, 0),
            pred.variance.get(i, 0).sqrt(),
            deterministic.mean().get(i, 0),
        );
    }

    println!("\nfirst three sampled curves at x = 0:");
    for (s, sample) in pred.samples.iter().take(3).enumerate() {
        println!("  draw {s}: {:>8.4}", sample.get(2, 0));
    }
    Ok(())
}
