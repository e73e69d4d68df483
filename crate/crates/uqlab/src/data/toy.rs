//! The noisy sine task: y = sin(x) + eps with input-dependent noise
//! sigma(x) = amplitude * sigmoid(x), plus its in/out-of-distribution split.

use crate::data::{LabeledSet, SetTag};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::sigmoid;
use crate::rng::RngState;

#[derive(Debug, Clone, PartialEq)]
pub struct ToyRegressionConfig {
    pub n_points: usize,
    /// Closed input interval; inputs are sampled uniformly over it.
    pub range: (f64, f64),
    /// Scale of the noise law sigma(x) = amplitude * sigmoid(x).
    pub noise_amplitude: f64,
    /// Record of the stream the caller seeds; generators draw from the
    /// RngState they are handed.
    pub seed: u64,
}

impl Default for ToyRegressionConfig {
    fn default() -> Self {
        ToyRegressionConfig {
            n_points: 1024,
            range: (-std::f64::consts::PI, std::f64::consts::PI),
            noise_amplitude: 0.15,
            seed: 0,
        }
    }
}

impl ToyRegressionConfig {
    fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(Error::Config("toy dataset needs at least one point".into()));
        }
        let (lo, hi) = self.range;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Config(format!("invalid input range [{lo}, {hi}]")));
        }
        if !(self.noise_amplitude > 0.0) || !self.noise_amplitude.is_finite() {
            return Err(Error::Config(format!(
                "noise amplitude must be positive, got {}",
                self.noise_amplitude
            )));
        }
        Ok(())
    }
}

/// The true noise standard deviation at `x`.
pub fn noise_sigma(amplitude: f64, x: f64) -> f64 {
    amplitude * sigmoid(x)
}

/// Draws the training task: x uniform over the range, y = sin(x) + eps with
/// eps ~ N(0, noise_sigma(x)^2). One uniform and one normal draw per point,
/// in point order.
pub fn sample_toy(config: &ToyRegressionConfig, rng: &mut RngState) -> Result<LabeledSet> {
    config.validate()?;
    let n = config.n_points;
    let mut inputs = Matrix::zeros(n, 1);
    let mut targets = Matrix::zeros(n, 1);
    for r in 0..n {
        let x = rng.uniform_in(config.range.0, config.range.1);
        let eps = rng.normal_with(0.0, noise_sigma(config.noise_amplitude, x));
        inputs.set(r, 0, x);
        targets.set(r, 0, x.sin() + eps);
    }
    Ok(LabeledSet { inputs, targets, tag: SetTag::Train })
}

/// In-distribution samples over the configured range plus an
/// out-of-distribution evaluation grid on both flanks. Each flank has
/// `ood_points_per_branch` points over an interval as wide as half the ID
/// range, strictly outside it; targets carry the noise-free sin(x).
pub fn ood_regression_split(
    config: &ToyRegressionConfig,
    ood_points_per_branch: usize,
    rng: &mut RngState,
) -> Result<(LabeledSet, LabeledSet)> {
    config.validate()?;
    if ood_points_per_branch == 0 {
        return Err(Error::Config("need at least one OOD point per branch".into()));
    }
    let mut id = sample_toy(config, rng)?;
    id.tag = SetTag::Id;

    let (lo, hi) = config.range;
    let branch_width = 0.5 * (hi - lo);
    let k = ood_points_per_branch;
    let step = branch_width / k as f64;
    let mut xs = Vec::with_capacity(2 * k);
    for i in 0..k {
        // Left flank, ascending from lo - width up to lo - step.
        xs.push(lo - branch_width + i as f64 * step);
    }
    for i in 1..=k {
        // Right flank, ascending from hi + step up to hi + width.
        xs.push(hi + i as f64 * step);
    }
    let inputs = Matrix::from_fn(2 * k, 1, |r, _| xs[r]);
    let targets = Matrix::from_fn(2 * k, 1, |r, _| xs[r].sin());
    let ood = LabeledSet { inputs, targets, tag: SetTag::Ood };
    Ok((id, ood))
}
