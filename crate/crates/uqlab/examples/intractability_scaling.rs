//! Times Monte-Carlo prediction across network sizes and sample counts to
//! show how fast "just sample the posterior" becomes expensive. Cells
//! whose projected cost exceeds the per-cell budget are truncated up
//! front, so the sweep itself stays cheap.

use uqlab::{run_scaling, sample_axis_inversions, width_scaling_slope, ScalingConfig};

fn main() -> uqlab::Result<()> {
    let config = ScalingConfig {
        depths: vec![2, 8],
        widths: vec![16, 64, 256, 1024],
        sample_counts: vec![1, 10, 100],
        repeats: 3,
        seed: 7,
        budget_seconds: 0.5,
    };
    let records = run_scaling(&config)?;

    println!("{:>5} {:>6} {:>9} {:>10}  {}", "depth", "width", "samples", "params", "median seconds");
    for r in &records {
        match r.median_seconds {
            Some(s) => println!("{:>5} {:>6} {:>9} {:>10}  {s:.6}", r.depth, r.width, r.n_samples, r.params),
            None => println!("{:>5} {:>6} {:>9} {:>10}  over budget", r.depth, r.width, r.n_samples, r.params),
        }
    }

    // Cost should rise monotonically with the sample count and roughly
    // quadratically with the width (the dense layers dominate).
    let inversions = sample_axis_inversions(&records, 2, 64);
    println!("\nsample-axis inversions on the depth 2, width 64 line: {inversions}");
    if let Some(slope) = width_scaling_slope(&records, 2, 10) {
        println!("log-log width slope at depth 2, 10 samples: {slope:.2}");
    }
    Ok(())
}
