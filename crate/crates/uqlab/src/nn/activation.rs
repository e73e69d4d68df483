//! Element-wise activations and the scalar helpers shared across the crate.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
            Activation::Sigmoid => sigmoid(x),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation output `y = f(x)`.
    pub fn grad_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Identity => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Identity => "identity",
        }
    }

    pub fn parse(name: &str) -> Result<Activation> {
        match name {
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::Config(format!("unknown activation '{other}'"))),
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable ln(1 + e^x).
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_at_zero_is_half() {
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn sigmoid_limits() {
        assert!((sigmoid(40.0) - 1.0).abs() < 1e-15);
        assert!(sigmoid(-40.0) < 1e-15);
    }

    #[test]
    fn softplus_stable_for_large_inputs() {
        assert!((softplus(800.0) - 800.0).abs() < 1e-9);
        assert!(softplus(-800.0) >= 0.0);
        assert!((softplus(0.0) - 2.0_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn grad_from_output_matches_numeric_derivative() {
        let acts = [Activation::Tanh, Activation::Sigmoid, Activation::Identity];
        let h = 1e-6;
        for act in acts {
            for &x in &[-1.3, -0.2, 0.4, 2.1] {
                let numeric = (act.apply(x + h) - act.apply(x - h)) / (2.0 * h);
                let analytic = act.grad_from_output(act.apply(x));
                assert!(
                    (numeric - analytic).abs() < 1e-8,
                    "{}: x={x} numeric={numeric} analytic={analytic}",
                    act.name()
                );
            }
        }
        // Relu away from the kink.
        for &x in &[-0.5, 0.5] {
            let numeric = (Activation::Relu.apply(x + h) - Activation::Relu.apply(x - h)) / (2.0 * h);
            let analytic = Activation::Relu.grad_from_output(Activation::Relu.apply(x));
            assert!((numeric - analytic).abs() < 1e-8);
        }
    }
}
