//! Shows that the ensemble's total predictive variance is exactly the sum
//! of its aleatoric and epistemic parts, and that the epistemic part is a
//! measure of member disagreement: duplicate one member five times and it
//! collapses to zero while the aleatoric part survives.

use uqlab::{
    ensemble_predict, ensemble_train, sample_toy, DeepEnsemble, EnsembleArch, Matrix, RngState,
    ToyRegressionConfig, TrainConfig,
};

fn main() -> uqlab::Result<()> {
    let data = sample_toy(&ToyRegressionConfig::default(), &mut RngState::new(7).derive(1))?;
    let config = TrainConfig { seed: 7, ..TrainConfig::default() };
    let ensemble = ensemble_train(&data.inputs, &data.targets, 5, &EnsembleArch::default(), &config)?;

    let grid: Vec<f64> = (0..100).map(|i| -3.0 + i as f64 * 0.06).collect();
    let inputs = Matrix::column(&grid)?;

    let summaries = ensemble_predict(&ensemble, &inputs)?;
    let max_gap = summaries
        .iter()
        .map(|s| (s.total[0] - (s.aleatoric[0] + s.epistemic[0])).abs())
        .fold(0.0, f64::max);
    println!("max |total - (aleatoric + epistemic)| over {} inputs: {max_gap:.2e}", grid.len());

    let mean_epi = |list: &[uqlab::PredictiveSummary]| {
        list.iter().map(|s| s.epistemic[0]).sum::<f64>() / list.len() as f64
    };
    println!("mean epistemic variance, distinct members:  {:.6}", mean_epi(&summaries));

    // Same network five times: the mixture has nothing to disagree about.
    let duplicated = DeepEnsemble::from_members(vec![ensemble.members()[0].clone(); 5])?;
    let collapsed = ensemble_predict(&duplicated, &inputs)?;
    println!("mean epistemic variance, duplicated member: {:.2e}", mean_epi(&collapsed));
    println!("mean aleatoric variance, duplicated member: {:.6}", collapsed.iter().map(|s| s.aleatoric[0]).sum::<f64>() / collapsed.len() as f64);
    Ok(())
}
