//! Trapezoidal integration of the predictive posterior for stochastic
//! networks with at most two stochastic weights. Anything larger is
//! rejected: enumerating weight space grows exponentially, which is the
//! point the capability error makes.

use crate::error::{Error, Result};
use crate::uq::stochastic::StochasticNet;

/// Grid specification per stochastic weight. The grid must cover at least
/// mean +/- 6 stddev for the truncation error to stay below Monte-Carlo
/// noise; widen it (e.g. 8) when comparing against tight analytic values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub half_width_sigmas: f64,
    pub points_per_weight: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { half_width_sigmas: 6.0, points_per_weight: 2001 }
    }
}

/// Standardized grid nodes and trapezoid coefficients, built symmetrically
/// so that node `i` and node `P-1-i` are exact negations of each other.
fn standard_grid(spec: &QuadratureSpec) -> (Vec<f64>, Vec<f64>) {
    let p = spec.points_per_weight;
    let h = spec.half_width_sigmas;
    let step = 2.0 * h / (p - 1) as f64;
    let mut nodes = vec![0.0; p];
    for i in 0..p / 2 {
        let t = -h + i as f64 * step;
        nodes[i] = t;
        nodes[p - 1 - i] = -t;
    }
    let mut coeffs = vec![1.0; p];
    coeffs[0] = 0.5;
    coeffs[p - 1] = 0.5;
    (nodes, coeffs)
}

/// Mean and variance per output of P(y|x) = integral of P(y|x,w) P(w) dw,
/// computed by quadrature over the stochastic weights (all other weights
/// held at their means). Exact up to grid truncation/discretization error.
pub fn predictive_posterior_quadrature(
    net: &StochasticNet,
    input: &[f64],
    spec: &QuadratureSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(spec.half_width_sigmas >= 6.0) || !spec.half_width_sigmas.is_finite() {
        return Err(Error::Config(format!(
            "quadrature grid must cover at least 6 stddevs, got {}",
            spec.half_width_sigmas
        )));
    }
    if spec.points_per_weight < 3 {
        return Err(Error::Config(format!(
            "quadrature needs at least 3 points per weight, got {}",
            spec.points_per_weight
        )));
    }
    if input.len() != net.input_dim() {
        return Err(Error::shape(
            "input width does not match the network",
            (1, net.input_dim()),
            (1, input.len()),
        ));
    }

    let (means, stddevs) = net.flat_distribution();
    let stochastic: Vec<usize> = stddevs
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 0.0)
        .map(|(i, _)| i)
        .collect();
    if stochastic.len() > 2 {
        return Err(Error::Capability { found: stochastic.len(), limit: 2 });
    }

    let mut scratch = net.mean_network();
    let out_dim = net.output_dim();
    let mut params = means.clone();

    if stochastic.is_empty() {
        scratch.set_params(&params)?;
        let y = scratch.forward_row(input)?;
        return Ok((y, vec![0.0; out_dim]));
    }

    let (nodes, coeffs) = standard_grid(spec);
    let density: Vec<f64> = nodes.iter().map(|t| (-0.5 * t * t).exp()).collect();

    let mut mass = 0.0;
    let mut first = vec![0.0; out_dim];
    let mut second = vec![0.0; out_dim];
    match stochastic.as_slice() {
        &[j] => {
            let (m, s) = (means[j], stddevs[j]);
            for i in 0..nodes.len() {
                params[j] = m + s * nodes[i];
                scratch.set_params(&params)?;
                let y = scratch.forward_row(input)?;
                let w = coeffs[i] * density[i];
                mass += w;
                for k in 0..out_dim {
                    first[k] += w * y[k];
                    second[k] += w * y[k] * y[k];
                }
            }
        }
        &[j0, j1] => {
            let (m0, s0) = (means[j0], stddevs[j0]);
            let (m1, s1) = (means[j1], stddevs[j1]);
            for i0 in 0..nodes.len() {
                params[j0] = m0 + s0 * nodes[i0];
                let w0 = coeffs[i0] * density[i0];
                for i1 in 0..nodes.len() {
                    params[j1] = m1 + s1 * nodes[i1];
                    scratch.set_params(&params)?;
                    let y = scratch.forward_row(input)?;
                    let w = w0 * coeffs[i1] * density[i1];
                    mass += w;
                    for k in 0..out_dim {
                        first[k] += w * y[k];
                        second[k] += w * y[k] * y[k];
                    }
                }
            }
        }
        _ => unreachable!("counts above 2 rejected earlier"),
    }

    let mut mean = vec![0.0; out_dim];
    let mut variance = vec![0.0; out_dim];
    for k in 0..out_dim {
        mean[k] = first[k] / mass;
        variance[k] = (second[k] / mass - mean[k] * mean[k]).max(0.0);
    }
    Ok((mean, variance))
}
