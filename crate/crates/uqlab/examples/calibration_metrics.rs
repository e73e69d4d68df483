//! The evaluation toolbox on known ground truth: a perfectly calibrated
//! simulated classifier lands near zero expected calibration error, an
//! overconfident one does not, and the Brier score and entropy move the
//! way the textbook says they should.

use uqlab::{brier, entropy, reliability, Matrix, RngState};

fn main() -> uqlab::Result<()> {
    let mut rng = RngState::new(7);
    let n = 50_000;

    // Calibrated: report confidence c and be correct with probability c.
    let confidences: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.55, 0.99)).collect();
    let outcomes: Vec<bool> = confidences.iter().map(|c| rng.bernoulli(*c)).collect();
    let calibrated = reliability(&confidences, &outcomes, 15)?;
    println!("calibrated simulation:   ECE = {:.4}", calibrated.ece);

    // Overconfident: same outcomes, but claim 0.99 everywhere.
    let inflated = vec![0.99; n];
    let overconfident = reliability(&inflated, &outcomes, 15)?;
    println!("overconfident variant:   ECE = {:.4}", overconfident.ece);

    for bin in calibrated.bins.iter().filter(|b| b.count > 0).take(4) {
        println!(
            "  bin [{:.2}, {:.2}): mean confidence {:.3}, accuracy {:.3}, count {}",
            bin.lo, bin.hi, bin.mean_confidence, bin.accuracy, bin.count
        );
    }

    // Brier score: sharp and right beats uniform beats sharp and wrong.
    let sharp_right = Matrix::from_vec(1, 4, vec![0.97, 0.01, 0.01, 0.01])?;
    let uniform = Matrix::from_vec(1, 4, vec![0.25; 4])?;
    let sharp_wrong = Matrix::from_vec(1, 4, vec![0.01, 0.97, 0.01, 0.01])?;
    println!("\nbrier, true class 0:");
    println!("  confident correct: {:.4}", brier(&sharp_right, &[0])?);
    println!("  uniform guess:     {:.4}", brier(&uniform, &[0])?);
    println!("  confident wrong:   {:.4}", brier(&sharp_wrong, &[0])?);

    println!("\nentropy, nats:");
    println!("  one-hot:    {:.4}", entropy(&[1.0, 0.0, 0.0, 0.0])?);
    println!("  uniform(4): {:.4} (ln 4 = {:.4})", entropy(&[0.25; 4])?, 4.0_f64.ln());
    Ok(())
}
