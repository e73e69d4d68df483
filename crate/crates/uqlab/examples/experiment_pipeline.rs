//! Drives a complete experiment through the library API instead of the
//! command line: build a configuration, run it, and read the artifacts
//! back with the bundled parsers. Re-running the echoed configuration
//! reproduces the CSV byte for byte.

use uqlab::experiment::{parse_config_pairs, parse_curve, parse_summary, summary_f64};
use uqlab::{run_experiment, ExperimentConfig, UseCase};

fn main() -> uqlab::Result<()> {
    let out_dir = std::env::temp_dir().join("uqlab-pipeline-demo");
    let mut config = ExperimentConfig::defaults(UseCase::RegressionEnsemble);
    config.out_dir = out_dir.clone();
    config.seed = 7;
    // Shrink the run so the example finishes in about a second.
    config.n_points = 256;
    config.epochs = 60;
    config.hidden = vec![32, 32];
    config.grid_points = 100;

    let artifacts = run_experiment(&config)?;
    println!("wrote {}", artifacts.csv_path.display());

    let rows = parse_curve(&std::fs::read_to_string(&artifacts.csv_path)?)?;
    println!("curve has {} rows; first sigma {:.4}, last sigma {:.4}", rows.len(), rows[0].pred_sigma, rows[rows.len() - 1].pred_sigma);

    let summary = parse_summary(&std::fs::read_to_string(&artifacts.summary_path)?)?;
    println!("in-range rank correlation of sigma with x: {:.3}", summary_f64(&summary, "spearman_sigma_vs_x_id")?);

    // The echo is a complete, reparseable record of the run.
    let echo = std::fs::read_to_string(&artifacts.config_path)?;
    let mut rebuilt = ExperimentConfig::defaults(UseCase::RegressionBaseline);
    for (key, value) in parse_config_pairs(&echo)? {
        rebuilt.apply(&key, &value)?;
    }
    assert_eq!(rebuilt, config);
    println!("config echo reproduces the configuration exactly");

    std::fs::remove_dir_all(&out_dir).ok();
    Ok(())
}
