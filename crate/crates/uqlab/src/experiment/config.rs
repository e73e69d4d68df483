//! Experiment configuration: defaults per use case, config-file parsing,
//! flag overrides, and the bit-exact config echo.
//!
//! Precedence, lowest to highest: built-in defaults for the use case, then
//! the `--config` file, then command-line flags, then the
//! `UQLAB_BENCH_BUDGET_SECONDS` environment variable (budget only).

use std::f64::consts::PI;
use std::path::PathBuf;

use crate::bench::ScalingConfig;
use crate::error::{Error, Result};
use crate::nn::{Activation, OptimizerKind, TrainConfig};

/// Environment variable overriding the bench per-cell time budget.
pub const BENCH_BUDGET_ENV_VAR: &str = "UQLAB_BENCH_BUDGET_SECONDS";

/// The seven runnable experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UseCase {
    RegressionBaseline,
    RegressionEnsemble,
    BnnSample,
    BnnScaling,
    Decompose,
    OodRegression,
    OodClassify,
}

impl UseCase {
    pub const ALL: [UseCase; 7] = [
        UseCase::RegressionBaseline,
        UseCase::RegressionEnsemble,
        UseCase::BnnSample,
        UseCase::BnnScaling,
        UseCase::Decompose,
        UseCase::OodRegression,
        UseCase::OodClassify,
    ];

    pub fn id(self) -> &'static str {
        match self {
            UseCase::RegressionBaseline => "regression-baseline",
            UseCase::RegressionEnsemble => "regression-ensemble",
            UseCase::BnnSample => "bnn-sample",
            UseCase::BnnScaling => "bnn-scaling",
            UseCase::Decompose => "decompose",
            UseCase::OodRegression => "ood-regression",
            UseCase::OodClassify => "ood-classify",
        }
    }

    pub fn parse(name: &str) -> Result<UseCase> {
        UseCase::ALL
            .into_iter()
            .find(|uc| uc.id() == name)
            .ok_or_else(|| {
                let known: Vec<&str> = UseCase::ALL.iter().map(|uc| uc.id()).collect();
                Error::Config(format!(
                    "unknown use case '{name}'; expected one of {}",
                    known.join(", ")
                ))
            })
    }
}

/// Complete, serializable description of one experiment run. The rendered
/// echo of this struct is sufficient to reproduce the run bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub use_case: UseCase,
    pub seed: u64,
    pub out_dir: PathBuf,

    // Toy regression data.
    pub n_points: usize,
    pub data_lo: f64,
    pub data_hi: f64,
    pub noise_amplitude: f64,
    pub ood_points_per_branch: usize,

    // Cluster classification data.
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub cluster_stddev: f64,
    /// OOD shift magnitude in units of the cluster stddev.
    pub shift_sigmas: f64,

    // Optional IDX data source (all five required together); empty = unset.
    pub idx_train_images: String,
    pub idx_train_labels: String,
    pub idx_test_images: String,
    pub idx_test_labels: String,
    pub idx_ood_images: String,

    // Evaluation.
    pub grid_points: usize,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub histogram_bins: usize,
    pub reliability_bins: usize,

    // Model.
    pub hidden: Vec<usize>,
    pub activation: Activation,
    pub ensemble_members: usize,
    /// Dropout rate for training and MC-dropout prediction; 0 disables.
    pub dropout_rate: f64,
    pub mc_samples: usize,
    pub bnn_hidden: Vec<usize>,
    pub stochastic_stddev: f64,

    // Training.
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerKind,

    // Scaling benchmark.
    pub bench_depths: Vec<usize>,
    pub bench_widths: Vec<usize>,
    pub bench_sample_counts: Vec<usize>,
    pub bench_repeats: usize,
    pub bench_budget_seconds: f64,
}

impl ExperimentConfig {
    /// Built-in defaults for a use case. Grids differ: the baseline curve
    /// covers the training range, ensemble-style curves extend to twice it
    /// so one artifact shows ID and OOD behavior, and the weight-sampling
    /// demo only needs a handful of probe points.
    pub fn defaults(use_case: UseCase) -> ExperimentConfig {
        let bench = ScalingConfig::default();
        let (grid_points, grid_lo, grid_hi) = match use_case {
            UseCase::RegressionBaseline => (200, -PI, PI),
            UseCase::BnnSample => (9, -PI, PI),
            _ => (400, -2.0 * PI, 2.0 * PI),
        };
        let dropout_rate = match use_case {
            UseCase::OodClassify => 0.1,
            _ => 0.0,
        };
        let epochs = match use_case {
            UseCase::OodClassify => 150,
            _ => 200,
        };
        ExperimentConfig {
            use_case,
            seed: 0,
            out_dir: PathBuf::from("out"),
            n_points: 1024,
            data_lo: -PI,
            data_hi: PI,
            noise_amplitude: 0.15,
            ood_points_per_branch: 100,
            train_per_class: 200,
            test_per_class: 100,
            cluster_stddev: 1.0,
            shift_sigmas: 6.0,
            idx_train_images: String::new(),
            idx_train_labels: String::new(),
            idx_test_images: String::new(),
            idx_test_labels: String::new(),
            idx_ood_images: String::new(),
            grid_points,
            grid_lo,
            grid_hi,
            histogram_bins: 30,
            reliability_bins: 15,
            hidden: vec![64, 64],
            activation: Activation::Tanh,
            ensemble_members: 5,
            dropout_rate,
            mc_samples: 100,
            bnn_hidden: vec![16, 16],
            stochastic_stddev: 0.1,
            learning_rate: 1e-3,
            epochs,
            batch_size: 64,
            optimizer: OptimizerKind::adam_default(),
            bench_depths: bench.depths,
            bench_widths: bench.widths,
            bench_sample_counts: bench.sample_counts,
            bench_repeats: bench.repeats,
            bench_budget_seconds: bench.budget_seconds,
        }
    }

    /// Applies one `key = value` pair from a config file or flag.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "use_case" => self.use_case = UseCase::parse(value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "n_points" => self.n_points = parse_num(key, value)?,
            "data_lo" => self.data_lo = parse_num(key, value)?,
            "data_hi" => self.data_hi = parse_num(key, value)?,
            "noise_amplitude" => self.noise_amplitude = parse_num(key, value)?,
            "ood_points_per_branch" => self.ood_points_per_branch = parse_num(key, value)?,
            "train_per_class" => self.train_per_class = parse_num(key, value)?,
            "test_per_class" => self.test_per_class = parse_num(key, value)?,
            "cluster_stddev" => self.cluster_stddev = parse_num(key, value)?,
            "shift_sigmas" => self.shift_sigmas = parse_num(key, value)?,
            "idx_train_images" => self.idx_train_images = value.to_string(),
            "idx_train_labels" => self.idx_train_labels = value.to_string(),
            "idx_test_images" => self.idx_test_images = value.to_string(),
            "idx_test_labels" => self.idx_test_labels = value.to_string(),
            "idx_ood_images" => self.idx_ood_images = value.to_string(),
            "grid_points" => self.grid_points = parse_num(key, value)?,
            "grid_lo" => self.grid_lo = parse_num(key, value)?,
            "grid_hi" => self.grid_hi = parse_num(key, value)?,
            "histogram_bins" => self.histogram_bins = parse_num(key, value)?,
            "reliability_bins" => self.reliability_bins = parse_num(key, value)?,
            "hidden" => self.hidden = parse_list(key, value)?,
            "activation" => self.activation = Activation::parse(value)?,
            "ensemble_members" => self.ensemble_members = parse_num(key, value)?,
            "dropout_rate" => self.dropout_rate = parse_num(key, value)?,
            "mc_samples" => self.mc_samples = parse_num(key, value)?,
            "bnn_hidden" => self.bnn_hidden = parse_list(key, value)?,
            "stochastic_stddev" => self.stochastic_stddev = parse_num(key, value)?,
            "learning_rate" => self.learning_rate = parse_num(key, value)?,
            "epochs" => self.epochs = parse_num(key, value)?,
            "batch_size" => self.batch_size = parse_num(key, value)?,
            "optimizer" => {
                self.optimizer = match value {
                    "sgd" => OptimizerKind::Sgd,
                    "adam" => OptimizerKind::adam_default(),
                    other => {
                        return Err(Error::Config(format!(
                            "unknown optimizer '{other}'; expected sgd or adam"
                        )))
                    }
                }
            }
            "bench_depths" => self.bench_depths = parse_list(key, value)?,
            "bench_widths" => self.bench_widths = parse_list(key, value)?,
            "bench_sample_counts" => self.bench_sample_counts = parse_list(key, value)?,
            "bench_repeats" => self.bench_repeats = parse_num(key, value)?,
            "bench_budget_seconds" => self.bench_budget_seconds = parse_num(key, value)?,
            other => {
                return Err(Error::Config(format!(
                    "unknown configuration key '{other}'"
                )))
            }
        }
        Ok(())
    }

    /// Renders the full configuration as sectioned `key = value` text.
    /// Rendering then parsing then rendering again is byte-stable.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("[experiment]\n");
        out.push_str(&format!("use_case = {}\n", self.use_case.id()));
        out.push_str(&format!("seed = {}\n", self.seed));
        out.push_str(&format!("out_dir = {}\n", self.out_dir.display()));
        out.push_str("\n[data]\n");
        out.push_str(&format!("n_points = {}\n", self.n_points));
        out.push_str(&format!("data_lo = {}\n", self.data_lo));
        out.push_str(&format!("data_hi = {}\n", self.data_hi));
        out.push_str(&format!("noise_amplitude = {}\n", self.noise_amplitude));
        out.push_str(&format!(
            "ood_points_per_branch = {}\n",
            self.ood_points_per_branch
        ));
        out.push_str(&format!("train_per_class = {}\n", self.train_per_class));
        out.push_str(&format!("test_per_class = {}\n", self.test_per_class));
        out.push_str(&format!("cluster_stddev = {}\n", self.cluster_stddev));
        out.push_str(&format!("shift_sigmas = {}\n", self.shift_sigmas));
        out.push_str(&format!("idx_train_images = {}\n", self.idx_train_images));
        out.push_str(&format!("idx_train_labels = {}\n", self.idx_train_labels));
        out.push_str(&format!("idx_test_images = {}\n", self.idx_test_images));
        out.push_str(&format!("idx_test_labels = {}\n", self.idx_test_labels));
        out.push_str(&format!("idx_ood_images = {}\n", self.idx_ood_images));
        out.push_str("\n[eval]\n");
        out.push_str(&format!("grid_points = {}\n", self.grid_points));
        out.push_str(&format!("grid_lo = {}\n", self.grid_lo));
        out.push_str(&format!("grid_hi = {}\n", self.grid_hi));
        out.push_str(&format!("histogram_bins = {}\n", self.histogram_bins));
        out.push_str(&format!("reliability_bins = {}\n", self.reliability_bins));
        out.push_str("\n[model]\n");
        out.push_str(&format!("hidden = {}\n", join(&self.hidden)));
        out.push_str(&format!("activation = {}\n", self.activation.name()));
        out.push_str(&format!("ensemble_members = {}\n", self.ensemble_members));
        out.push_str(&format!("dropout_rate = {}\n", self.dropout_rate));
        out.push_str(&format!("mc_samples = {}\n", self.mc_samples));
        out.push_str(&format!("bnn_hidden = {}\n", join(&self.bnn_hidden)));
        out.push_str(&format!("stochastic_stddev = {}\n", self.stochastic_stddev));
        out.push_str("\n[train]\n");
        out.push_str(&format!("learning_rate = {}\n", self.learning_rate));
        out.push_str(&format!("epochs = {}\n", self.epochs));
        out.push_str(&format!("batch_size = {}\n", self.batch_size));
        out.push_str(&format!("optimizer = {}\n", self.optimizer.name()));
        out.push_str("\n[bench]\n");
        out.push_str(&format!("bench_depths = {}\n", join(&self.bench_depths)));
        out.push_str(&format!("bench_widths = {}\n", join(&self.bench_widths)));
        out.push_str(&format!(
            "bench_sample_counts = {}\n",
            join(&self.bench_sample_counts)
        ));
        out.push_str(&format!("bench_repeats = {}\n", self.bench_repeats));
        out.push_str(&format!(
            "bench_budget_seconds = {}\n",
            self.bench_budget_seconds
        ));
        out
    }

    /// Training settings derived from the shared keys; the run seed feeds
    /// the shuffle/mask stream.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed: self.seed,
            optimizer: self.optimizer,
            dropout_rate: if self.dropout_rate > 0.0 {
                Some(self.dropout_rate)
            } else {
                None
            },
        }
    }

    /// Scaling-sweep settings derived from the bench keys.
    pub fn scaling_config(&self) -> ScalingConfig {
        ScalingConfig {
            depths: self.bench_depths.clone(),
            widths: self.bench_widths.clone(),
            sample_counts: self.bench_sample_counts.clone(),
            repeats: self.bench_repeats,
            seed: self.seed,
            budget_seconds: self.bench_budget_seconds,
        }
    }

    /// Applies the bench-budget override; `raw` is the environment value
    /// when set. Split out from environment access so it is testable.
    pub fn apply_env_budget(&mut self, raw: Option<&str>) -> Result<()> {
        if let Some(raw) = raw {
            let budget: f64 = raw.parse().map_err(|e| {
                Error::Config(format!("bad {BENCH_BUDGET_ENV_VAR} value {raw:?}: {e}"))
            })?;
            self.bench_budget_seconds = budget;
        }
        Ok(())
    }

    /// Cheap structural validation; anything that would only fail deep in a
    /// runner is left to the library's own checks.
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::Config("grid_points must be at least 2".into()));
        }
        if !(self.grid_lo < self.grid_hi) {
            return Err(Error::Config(format!(
                "grid range [{}, {}] is empty",
                self.grid_lo, self.grid_hi
            )));
        }
        if !(self.data_lo < self.data_hi) {
            return Err(Error::Config(format!(
                "data range [{}, {}] is empty",
                self.data_lo, self.data_hi
            )));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::Config(format!(
                "dropout_rate must be in [0, 1), got {}",
                self.dropout_rate
            )));
        }
        if self.mc_samples == 0 {
            return Err(Error::Config("mc_samples must be at least 1".into()));
        }
        if self.ensemble_members < 2 {
            return Err(Error::Config(
                "ensemble_members must be at least 2".into(),
            ));
        }
        if !(self.cluster_stddev > 0.0) {
            return Err(Error::Config(format!(
                "cluster_stddev must be positive, got {}",
                self.cluster_stddev
            )));
        }
        if !(self.shift_sigmas > 0.0) {
            return Err(Error::Config(format!(
                "shift_sigmas must be positive, got {}",
                self.shift_sigmas
            )));
        }
        self.scaling_config().validate()
    }
}

fn join(list: &[usize]) -> String {
    list.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Config(format!("bad value for {key}: {value:?} ({e})")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|tok| parse_num(key, tok))
        .collect()
}

/// Extracts `key = value` pairs from sectioned config text. Section headers
/// organize the file but keys are globally unique, so they are skipped.
pub fn parse_config_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(Error::Config(format!(
                    "config line {}: malformed section header {line:?}",
                    lineno + 1
                )));
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "config line {}: expected key = value, got {line:?}",
                lineno + 1
            ))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Builds the final configuration from command-line arguments.
///
/// Every configuration key is settable as `--key value` (dashes and
/// underscores are interchangeable in flag names); `--config FILE` loads a
/// config file first, and explicit flags win over the file.
pub fn config_from_args(args: &[String]) -> Result<ExperimentConfig> {
    let mut flag_pairs: Vec<(String, String)> = Vec::new();
    let mut config_path: Option<PathBuf> = None;
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        let key = arg.strip_prefix("--").ok_or_else(|| {
            Error::Config(format!("expected a --flag, got {arg:?}"))
        })?;
        let value = args.get(i + 1).ok_or_else(|| {
            Error::Config(format!("flag {arg} is missing its value"))
        })?;
        let key = key.replace('-', "_");
        if key == "config" {
            config_path = Some(PathBuf::from(value));
        } else {
            flag_pairs.push((key, value.clone()));
        }
        i += 2;
    }

    let file_pairs = match &config_path {
        Some(path) => parse_config_pairs(&std::fs::read_to_string(path)?)?,
        None => Vec::new(),
    };

    // The use case picks the defaults, so resolve it first: flags beat the
    // file, the file beats nothing.
    let use_case_name = flag_pairs
        .iter()
        .chain(file_pairs.iter())
        .find(|(k, _)| k == "use_case")
        .map(|(_, v)| v.clone())
        .ok_or_else(|| Error::Config("no use case given; pass --use-case".into()))?;
    let mut cfg = ExperimentConfig::defaults(UseCase::parse(&use_case_name)?);

    for (key, value) in file_pairs.iter().chain(flag_pairs.iter()) {
        cfg.apply(key, value)?;
    }
    cfg.apply_env_budget(std::env::var(BENCH_BUDGET_ENV_VAR).ok().as_deref())?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn defaults_differ_per_use_case() {
        let baseline = ExperimentConfig::defaults(UseCase::RegressionBaseline);
        assert_eq!(baseline.grid_points, 200);
        assert_eq!(baseline.grid_hi, PI);
        assert_eq!(baseline.dropout_rate, 0.0);
        let ensemble = ExperimentConfig::defaults(UseCase::RegressionEnsemble);
        assert_eq!(ensemble.grid_points, 400);
        assert_eq!(ensemble.grid_hi, 2.0 * PI);
        assert_eq!(ensemble.ensemble_members, 5);
        let classify = ExperimentConfig::defaults(UseCase::OodClassify);
        assert_eq!(classify.dropout_rate, 0.1);
    }

    #[test]
    fn render_parse_render_is_byte_stable() {
        let mut cfg = ExperimentConfig::defaults(UseCase::OodRegression);
        cfg.seed = 42;
        cfg.noise_amplitude = 0.3;
        let echo = cfg.render();
        let mut reparsed = ExperimentConfig::defaults(UseCase::RegressionBaseline);
        for (k, v) in parse_config_pairs(&echo).unwrap() {
            reparsed.apply(&k, &v).unwrap();
        }
        assert_eq!(reparsed, cfg);
        assert_eq!(reparsed.render(), echo);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.config");
        std::fs::write(
            &path,
            "use_case = regression-baseline\nseed = 5\nepochs = 10\n",
        )
        .unwrap();
        let cfg = config_from_args(&args(&[
            "--config",
            path.to_str().unwrap(),
            "--seed",
            "9",
        ]))
        .unwrap();
        assert_eq!(cfg.use_case, UseCase::RegressionBaseline);
        assert_eq!(cfg.seed, 9, "flag beats file");
        assert_eq!(cfg.epochs, 10, "file beats default");
    }

    #[test]
    fn dashes_and_underscores_both_accepted_in_flags() {
        let cfg = config_from_args(&args(&[
            "--use-case",
            "bnn-sample",
            "--out-dir",
            "/tmp/runs",
            "--mc_samples",
            "17",
        ]))
        .unwrap();
        assert_eq!(cfg.use_case, UseCase::BnnSample);
        assert_eq!(cfg.out_dir, PathBuf::from("/tmp/runs"));
        assert_eq!(cfg.mc_samples, 17);
    }

    #[test]
    fn bad_input_is_a_config_error() {
        for bad in [
            args(&["--use-case", "nope"]),
            args(&["--seed", "1"]),
            args(&["--use-case", "decompose", "--epochs"]),
            args(&["--use-case", "decompose", "--no-such-key", "1"]),
            args(&["--use-case", "decompose", "--epochs", "three"]),
            args(&["--use-case", "decompose", "--dropout-rate", "1.5"]),
            args(&["--use-case", "decompose", "--grid-points", "1"]),
        ] {
            let err = config_from_args(&bad).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{err}");
        }
    }

    #[test]
    fn env_budget_override_wins() {
        let mut cfg = ExperimentConfig::defaults(UseCase::BnnScaling);
        cfg.bench_budget_seconds = 10.0;
        cfg.apply_env_budget(Some("0.25")).unwrap();
        assert_eq!(cfg.bench_budget_seconds, 0.25);
        cfg.apply_env_budget(None).unwrap();
        assert_eq!(cfg.bench_budget_seconds, 0.25, "unset leaves it alone");
        assert!(cfg.apply_env_budget(Some("fast")).is_err());
    }

    #[test]
    fn use_case_ids_round_trip() {
        for uc in UseCase::ALL {
            assert_eq!(UseCase::parse(uc.id()).unwrap(), uc);
        }
        assert!(UseCase::parse("regression").is_err());
    }

    #[test]
    fn train_and_scaling_configs_inherit_the_seed() {
        let mut cfg = ExperimentConfig::defaults(UseCase::OodClassify);
        cfg.seed = 77;
        assert_eq!(cfg.train_config().seed, 77);
        assert_eq!(cfg.scaling_config().seed, 77);
        assert_eq!(cfg.train_config().dropout_rate, Some(0.1));
        cfg.dropout_rate = 0.0;
        assert_eq!(cfg.train_config().dropout_rate, None);
    }
}
