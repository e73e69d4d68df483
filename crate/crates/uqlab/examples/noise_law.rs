//! Empirically verifies the generator's heteroscedastic noise law: the
//! residual y - sin(x), binned by x, should have standard deviation
//! 0.15 * sigmoid(x). This is the ground truth the two-headed networks'
//! aleatoric head is supposed to recover.

use uqlab::{noise_sigma, sample_toy, RngState, ToyRegressionConfig};

fn main() -> uqlab::Result<()> {
    let config = ToyRegressionConfig { n_points: 100_000, ..ToyRegressionConfig::default() };
    let data = sample_toy(&config, &mut RngState::new(7))?;

    let bins = 10;
    let (lo, hi) = config.range;
    let width = (hi - lo) / bins as f64;
    let mut residuals: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for r in 0..data.inputs.rows() {
        let x = data.inputs.get(r, 0);
        let bin = (((x - lo) / width) as usize).min(bins - 1);
        residuals[bin].push(data.targets.get(r, 0) - x.sin());
    }

    println!("{:>16}  {:>10}  {:>10}  {:>7}", "bin", "empirical", "law", "ratio");
    for (b, res) in residuals.iter().enumerate() {
        let center = lo + (b as f64 + 0.5) * width;
        let mean = res.iter().sum::<f64>() / res.len() as f64;
        let var = res.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / res.len() as f64;
        let empirical = var.sqrt();
        let law = noise_sigma(config.noise_amplitude, center);
        println!(
            "[{:>6.2}, {:>6.2})  {empirical:>10.5}  {law:>10.5}  {:>7.3}",
            lo + b as f64 * width,
            lo + (b + 1) as f64 * width,
            empirical / law,
        );
    }
    Ok(())
}
