//! Verifies the hand-written backpropagation against central finite
//! differences on randomly shaped networks, under both the MSE and the
//! Gaussian negative log-likelihood losses. This is the test that keeps
//! every other result in the crate trustworthy.

use uqlab::{backward, finite_diff_grad, Activation, Loss, Matrix, Mlp, RngState};

fn main() -> uqlab::Result<()> {
    let mut rng = RngState::new(7);
    let mut worst: f64 = 0.0;

    for trial in 0..20 {
        let width = 1 + (rng.gen_range_usize(8));
        let hidden = vec![width; 1 + rng.gen_range_usize(2)];
        let loss = if trial % 2 == 0 { Loss::Mse } else { Loss::GaussianNll };
        let net = match loss {
            Loss::Mse => {
                let mut dims = vec![2];
                dims.extend(&hidden);
                dims.push(1);
                Mlp::single(&dims, Activation::Tanh, Activation::Identity, &mut rng)?
            }
            Loss::GaussianNll => Mlp::two_headed(2, &hidden, 1, Activation::Tanh, &mut rng)?,
        };

        let inputs = Matrix::from_fn(4, 2, |_, _| rng.uniform_in(-1.0, 1.0));
        let targets = Matrix::from_fn(4, 1, |_, _| rng.uniform_in(-1.0, 1.0));
        let analytic = backward(&net, &inputs, &targets, loss)?;
        let numeric = finite_diff_grad(&net, &inputs, &targets, loss, 1e-5)?;

        let rel_err = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-8))
            .fold(0.0, f64::max);
        worst = worst.max(rel_err);
        println!(
            "net {trial:>2} ({} params, {:>11}): max relative error {rel_err:.2e}",
            net.param_count(),
            loss.name(),
        );
    }

    println!("\nworst case over all trials: {worst:.2e}");
    assert!(worst < 1e-4, "backpropagation disagrees with finite differences");
    Ok(())
}
