//! The predictive posterior P(y|x) = integral of P(y|x,w) P(w) dw is only
//! tractable when very few weights are random. This example computes it
//! exactly (by quadrature) for a single-stochastic-weight network, checks
//! Monte-Carlo sampling against it, and then shows the capability error
//! that integration throws as soon as the weight count grows.

use uqlab::{
    predictive_posterior_quadrature, stochastic_predict, Activation, GaussianWeightLayer, Matrix,
    QuadratureSpec, RngState, StochasticNet,
};

fn main() -> uqlab::Result<()> {
    // One random weight: y = tanh(w x), w ~ N(0.8, 0.25^2).
    let layer = GaussianWeightLayer::new(
        Matrix::from_vec(1, 1, vec![0.8])?,
        Matrix::from_vec(1, 1, vec![0.25])?,
        vec![0.0],
        vec![0.0],
        Activation::Tanh,
    )?;
    let net = StochasticNet::new(vec![layer])?;

    let x = 1.3;
    let (q_mean, q_var) = predictive_posterior_quadrature(&net, &[x], &QuadratureSpec::default())?;
    println!("quadrature:   mean {:.6}  variance {:.6}", q_mean[0], q_var[0]);

    for n in [100, 10_000, 1_000_000] {
        let pred = stochastic_predict(&net, &Matrix::from_vec(1, 1, vec![x])?, n, &mut RngState::new(7))?;
        println!(
            "monte carlo:  mean {:.6}  variance {:.6}   ({n} samples)",
            pred.mean.get(0, 0),
            pred.variance.get(0, 0),
        );
    }

    // Three stochastic weights are already past the integration limit; the
    // grid would need points_per_weight^3 evaluations and the library
    // refuses rather than pretending to scale.
    let wide = StochasticNet::random(&[1, 2, 1], 0.1, Activation::Tanh, &mut RngState::new(7))?;
    match predictive_posterior_quadrature(&wide, &[x], &QuadratureSpec::default()) {
        Err(err) => println!("\n{} stochastic weights: {err}", wide.stochastic_weight_count()),
        Ok(_) => unreachable!("the capability guard rejects this network"),
    }
    Ok(())
}
