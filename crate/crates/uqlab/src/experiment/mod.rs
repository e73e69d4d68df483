//! End-to-end experiment pipeline: a flat key/value configuration with
//! per-use-case defaults, runners that produce CSV/summary/config-echo
//! artifacts, and the parsers that read those artifacts back.

pub mod config;
pub mod csv;
pub mod run;

pub use config::{
    config_from_args, parse_config_pairs, ExperimentConfig, UseCase, BENCH_BUDGET_ENV_VAR,
};
pub use csv::{
    parse_baseline, parse_curve, parse_histograms, parse_roc, parse_samples, parse_summary,
    render_baseline, render_curve, render_histograms, render_roc, render_samples, render_summary,
    summary_f64, write_atomic, BaselineRow, HistogramRow, RegressionCurveRow, SampleRow,
    BASELINE_HEADER, CURVE_HEADER, DECOMPOSITION_TOLERANCE, HISTOGRAM_HEADER, ROC_HEADER,
    SAMPLE_HEADER,
};
pub use run::{run_experiment, RunArtifacts};
