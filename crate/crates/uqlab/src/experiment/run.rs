//! Experiment runners. Each use case turns one [`ExperimentConfig`] into a
//! set of files under the output directory: the primary CSV, a bit-exact
//! config echo, a `key = value` summary, and occasionally extra CSVs. All
//! randomness flows from the configured seed, so a re-run from the echoed
//! config reproduces every data artifact byte for byte (the scaling sweep's
//! wall-clock columns are the one exception).

use std::path::PathBuf;

use crate::bench::{emit_scaling_report, run_scaling};
use crate::data::{
    load_idx, ood_regression_split, parse_idx_images, sample_clusters, sample_toy, ClusterConfig,
    LabeledSet, ToyRegressionConfig,
};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metrics::{brier, entropy, histogram, mae, reliability, roc, spearman};
use crate::nn::{train, Activation, Loss, Mlp};
use crate::rng::RngState;
use crate::uq::{
    ensemble_predict, ensemble_train, mc_dropout_predict, stochastic_predict, DeepEnsemble,
    EnsembleArch, StochasticNet,
};

use super::config::{ExperimentConfig, UseCase};
use super::csv::{
    render_baseline, render_curve, render_histograms, render_roc, render_samples, render_summary,
    write_atomic, BaselineRow, RegressionCurveRow, SampleRow,
};

// Stream tags for run-level randomness. Large values so they cannot collide
// with the small member indices the ensemble derives from the same seed.
const DATA_STREAM: u64 = 0x6461_7461;
const INIT_STREAM: u64 = 0x696e_6974;
const MC_STREAM: u64 = 0x6d63_6d63;

/// Paths of everything a run wrote.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub config_path: PathBuf,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub extra_csv_paths: Vec<PathBuf>,
}

struct RunOutput {
    csv: String,
    summary: Vec<(&'static str, String)>,
    extras: Vec<(&'static str, String)>,
}

/// Runs the configured use case and writes `<use-case>-<seed>.csv`,
/// `.config`, and `.summary` (plus `-<name>.csv` extras) into the output
/// directory, creating it if needed. Every file is written atomically.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunArtifacts> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;

    let output = match cfg.use_case {
        UseCase::RegressionBaseline => run_baseline(cfg)?,
        UseCase::RegressionEnsemble => run_ensemble(cfg)?,
        UseCase::BnnSample => run_bnn_sample(cfg)?,
        UseCase::BnnScaling => run_bnn_scaling(cfg)?,
        UseCase::Decompose => run_decompose(cfg)?,
        UseCase::OodRegression => run_ood_regression(cfg)?,
        UseCase::OodClassify => run_ood_classify(cfg)?,
    };

    let stem = format!("{}-{}", cfg.use_case.id(), cfg.seed);
    let config_path = cfg.out_dir.join(format!("{stem}.config"));
    write_atomic(&config_path, &cfg.render())?;
    let csv_path = cfg.out_dir.join(format!("{stem}.csv"));
    write_atomic(&csv_path, &output.csv)?;
    let mut extra_csv_paths = Vec::new();
    for (suffix, text) in &output.extras {
        let path = cfg.out_dir.join(format!("{stem}-{suffix}.csv"));
        write_atomic(&path, text)?;
        extra_csv_paths.push(path);
    }
    let summary_path = cfg.out_dir.join(format!("{stem}.summary"));
    write_atomic(&summary_path, &render_summary(&output.summary))?;
    Ok(RunArtifacts { config_path, csv_path, summary_path, extra_csv_paths })
}

fn toy_config(cfg: &ExperimentConfig) -> ToyRegressionConfig {
    ToyRegressionConfig {
        n_points: cfg.n_points,
        range: (cfg.data_lo, cfg.data_hi),
        noise_amplitude: cfg.noise_amplitude,
        seed: cfg.seed,
    }
}

fn eval_grid(cfg: &ExperimentConfig) -> Vec<f64> {
    let n = cfg.grid_points;
    let step = (cfg.grid_hi - cfg.grid_lo) / (n - 1) as f64;
    (0..n).map(|i| cfg.grid_lo + i as f64 * step).collect()
}

fn fmt(v: f64) -> String {
    v.to_string()
}

/// Mean-only fit of the noisy sine: train a single-head network under MSE
/// and trace its prediction against the clean curve.
fn run_baseline(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let base = RngState::new(cfg.seed);
    let train_set = sample_toy(&toy_config(cfg), &mut base.derive(DATA_STREAM))?;

    let mut dims = vec![1];
    dims.extend_from_slice(&cfg.hidden);
    dims.push(1);
    let mut net = Mlp::single(
        &dims,
        cfg.activation,
        Activation::Identity,
        &mut base.derive(INIT_STREAM),
    )?;
    let report = train(
        &mut net,
        &train_set.inputs,
        &train_set.targets,
        &cfg.train_config(),
        Loss::Mse,
    )?;

    let xs = eval_grid(cfg);
    let pred = net.forward(&Matrix::column(&xs)?)?;
    let rows: Vec<BaselineRow> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| BaselineRow { x, pred_mu: pred.mean().get(i, 0), true_mu: x.sin() })
        .collect();
    let pred_col: Vec<f64> = rows.iter().map(|r| r.pred_mu).collect();
    let true_col: Vec<f64> = rows.iter().map(|r| r.true_mu).collect();

    Ok(RunOutput {
        csv: render_baseline(&rows),
        summary: vec![
            ("final_loss", fmt(report.final_loss().unwrap_or(f64::NAN))),
            ("grid_mae", fmt(mae(&pred_col, &true_col)?)),
        ],
        extras: Vec::new(),
    })
}

fn train_toy_ensemble(cfg: &ExperimentConfig, train_set: &LabeledSet) -> Result<DeepEnsemble> {
    let arch = EnsembleArch { hidden: cfg.hidden.clone(), activation: cfg.activation };
    ensemble_train(
        &train_set.inputs,
        &train_set.targets,
        cfg.ensemble_members,
        &arch,
        &cfg.train_config(),
    )
}

fn curve_rows(
    ensemble: &DeepEnsemble,
    xs: &[f64],
) -> Result<Vec<RegressionCurveRow>> {
    let summaries = ensemble_predict(ensemble, &Matrix::column(xs)?)?;
    Ok(xs
        .iter()
        .zip(&summaries)
        .map(|(&x, s)| {
            RegressionCurveRow::from_variances(x, s.mean[0], x.sin(), s.aleatoric[0], s.epistemic[0])
        })
        .collect())
}

/// Splits curve rows into the in-distribution span and everything outside it.
fn split_id_ood<'a>(
    cfg: &ExperimentConfig,
    rows: &'a [RegressionCurveRow],
) -> (Vec<&'a RegressionCurveRow>, Vec<&'a RegressionCurveRow>) {
    rows.iter()
        .partition(|r| r.x >= cfg.data_lo && r.x <= cfg.data_hi)
}

/// Ensemble of two-headed networks on the noisy sine, traced over a grid
/// that extends past the training range on both sides.
fn run_ensemble(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let base = RngState::new(cfg.seed);
    let train_set = sample_toy(&toy_config(cfg), &mut base.derive(DATA_STREAM))?;
    let ensemble = train_toy_ensemble(cfg, &train_set)?;
    let rows = curve_rows(&ensemble, &eval_grid(cfg))?;

    let (id_rows, ood_rows) = split_id_ood(cfg, &rows);
    let id_x: Vec<f64> = id_rows.iter().map(|r| r.x).collect();
    let id_sigma: Vec<f64> = id_rows.iter().map(|r| r.pred_sigma).collect();
    let id_pred: Vec<f64> = id_rows.iter().map(|r| r.pred_mu).collect();
    let id_true: Vec<f64> = id_rows.iter().map(|r| r.true_mu).collect();
    let mean_epi = |rows: &[&RegressionCurveRow]| {
        rows.iter().map(|r| r.pred_sigma_epi).sum::<f64>() / rows.len().max(1) as f64
    };

    Ok(RunOutput {
        csv: render_curve(&rows),
        summary: vec![
            ("members", cfg.ensemble_members.to_string()),
            ("id_mae", fmt(mae(&id_pred, &id_true)?)),
            ("spearman_sigma_vs_x_id", fmt(spearman(&id_x, &id_sigma)?)),
            ("mean_sigma_epi_id", fmt(mean_epi(&id_rows))),
            ("mean_sigma_epi_ood", fmt(mean_epi(&ood_rows))),
        ],
        extras: Vec::new(),
    })
}

/// Same pipeline as the ensemble run, but the summary interrogates the
/// uncertainty decomposition itself: additivity across the curve, the noise
/// gradient between the range ends, and the collapse of the epistemic term
/// when every member is the same network.
fn run_decompose(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let base = RngState::new(cfg.seed);
    let train_set = sample_toy(&toy_config(cfg), &mut base.derive(DATA_STREAM))?;
    let ensemble = train_toy_ensemble(cfg, &train_set)?;
    let rows = curve_rows(&ensemble, &eval_grid(cfg))?;

    let max_decomposition_error = rows
        .iter()
        .map(|r| {
            let total = r.pred_sigma * r.pred_sigma;
            let parts =
                r.pred_sigma_ale * r.pred_sigma_ale + r.pred_sigma_epi * r.pred_sigma_epi;
            (total - parts).abs()
        })
        .fold(0.0, f64::max);

    let ends = ensemble_predict(&ensemble, &Matrix::from_vec(2, 1, vec![cfg.data_lo, cfg.data_hi])?)?;
    let sigma_ale_at_lo = ends[0].aleatoric[0].sqrt();
    let sigma_ale_at_hi = ends[1].aleatoric[0].sqrt();

    let clones = vec![ensemble.members()[0].clone(); cfg.ensemble_members];
    let duplicated = DeepEnsemble::from_members(clones)?;
    let duplicate_max_sigma_epi = ensemble_predict(&duplicated, &Matrix::column(&eval_grid(cfg))?)?
        .iter()
        .map(|s| s.epistemic[0].sqrt())
        .fold(0.0, f64::max);

    Ok(RunOutput {
        csv: render_curve(&rows),
        summary: vec![
            ("members", cfg.ensemble_members.to_string()),
            ("max_decomposition_error", fmt(max_decomposition_error)),
            ("sigma_ale_at_data_lo", fmt(sigma_ale_at_lo)),
            ("sigma_ale_at_data_hi", fmt(sigma_ale_at_hi)),
            ("duplicate_members_max_sigma_epi", fmt(duplicate_max_sigma_epi)),
        ],
        extras: Vec::new(),
    })
}

/// Draws whole networks from a stochastic-weight model and records every
/// sampled curve next to the deterministic mean-weight curve.
fn run_bnn_sample(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let base = RngState::new(cfg.seed);
    let mut dims = vec![1];
    dims.extend_from_slice(&cfg.bnn_hidden);
    dims.push(1);
    let net = StochasticNet::random(
        &dims,
        cfg.stochastic_stddev,
        cfg.activation,
        &mut base.derive(INIT_STREAM),
    )?;

    let xs = eval_grid(cfg);
    let inputs = Matrix::column(&xs)?;
    let pred = stochastic_predict(&net, &inputs, cfg.mc_samples, &mut base.derive(MC_STREAM))?;

    // The mean-weight network is an ordinary deterministic model: two
    // forward passes must agree bit for bit.
    let deterministic = net.mean_network();
    let first = deterministic.forward(&inputs)?;
    let second = deterministic.forward(&inputs)?;
    let repeats_identical = first.mean() == second.mean();

    let mut rows = Vec::with_capacity(cfg.mc_samples * xs.len());
    for (s, sample) in pred.samples.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            rows.push(SampleRow {
                sample: s,
                x,
                y_stochastic: sample.get(i, 0),
                y_deterministic: first.mean().get(i, 0),
            });
        }
    }

    let variances = pred.variance.as_slice();
    let mean_variance = variances.iter().sum::<f64>() / variances.len() as f64;
    let max_variance = variances.iter().copied().fold(0.0, f64::max);

    Ok(RunOutput {
        csv: render_samples(&rows),
        summary: vec![
            ("params", net.param_count().to_string()),
            ("stochastic_weights", net.stochastic_weight_count().to_string()),
            ("mc_samples", cfg.mc_samples.to_string()),
            ("mean_predictive_variance", fmt(mean_variance)),
            ("max_predictive_variance", fmt(max_variance)),
            ("deterministic_repeats_identical", repeats_identical.to_string()),
        ],
        extras: Vec::new(),
    })
}

/// Times Monte-Carlo prediction across a grid of network sizes and sample
/// counts; the report format is the sweep's own sectioned CSV.
fn run_bnn_scaling(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let scaling = cfg.scaling_config();
    let records = run_scaling(&scaling)?;
    let measured = records.iter().filter(|r| r.median_seconds.is_some()).count();
    Ok(RunOutput {
        csv: emit_scaling_report(&scaling, &records)?,
        summary: vec![
            ("cells_total", records.len().to_string()),
            ("cells_measured", measured.to_string()),
            ("cells_truncated", (records.len() - measured).to_string()),
        ],
        extras: Vec::new(),
    })
}

/// Trains an ensemble inside the data range only, then confronts it with
/// points from both flanks outside it.
fn run_ood_regression(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let base = RngState::new(cfg.seed);
    let (id_set, ood_set) = ood_regression_split(
        &toy_config(cfg),
        cfg.ood_points_per_branch,
        &mut base.derive(DATA_STREAM),
    )?;
    let ensemble = train_toy_ensemble(cfg, &id_set)?;
    let rows = curve_rows(&ensemble, &eval_grid(cfg))?;

    // Errors on both sets are measured against the clean curve, so the
    // comparison is not skewed by the label noise in the ID draw.
    let eval_set = |inputs: &Matrix| -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let summaries = ensemble_predict(&ensemble, inputs)?;
        let pred: Vec<f64> = summaries.iter().map(|s| s.mean[0]).collect();
        let truth: Vec<f64> = (0..inputs.rows()).map(|r| inputs.get(r, 0).sin()).collect();
        let sigma_epi: Vec<f64> = summaries.iter().map(|s| s.epistemic[0].sqrt()).collect();
        let xs: Vec<f64> = (0..inputs.rows()).map(|r| inputs.get(r, 0)).collect();
        Ok((mae(&pred, &truth)?, sigma_epi, xs))
    };
    let (id_mae, id_sigma_epi, _) = eval_set(&id_set.inputs)?;
    let (ood_mae, ood_sigma_epi, ood_xs) = eval_set(&ood_set.inputs)?;

    // Per flank: does epistemic uncertainty track the distance from the
    // training boundary?
    let branch_spearman = |left: bool| -> Result<f64> {
        let mut distances = Vec::new();
        let mut sigmas = Vec::new();
        for (&x, &sigma) in ood_xs.iter().zip(&ood_sigma_epi) {
            if left && x < cfg.data_lo {
                distances.push(cfg.data_lo - x);
                sigmas.push(sigma);
            } else if !left && x > cfg.data_hi {
                distances.push(x - cfg.data_hi);
                sigmas.push(sigma);
            }
        }
        spearman(&distances, &sigmas)
    };

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    Ok(RunOutput {
        csv: render_curve(&rows),
        summary: vec![
            ("id_mae", fmt(id_mae)),
            ("ood_mae", fmt(ood_mae)),
            ("mean_sigma_epi_id", fmt(mean(&id_sigma_epi))),
            ("mean_sigma_epi_ood", fmt(mean(&ood_sigma_epi))),
            ("spearman_distance_sigma_epi_left", fmt(branch_spearman(true)?)),
            ("spearman_distance_sigma_epi_right", fmt(branch_spearman(false)?)),
        ],
        extras: Vec::new(),
    })
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Loads the classification data: Gaussian blobs by default, or IDX files
/// when all five paths are configured.
fn classify_data(
    cfg: &ExperimentConfig,
    rng: &mut RngState,
) -> Result<(LabeledSet, LabeledSet, Matrix, &'static str)> {
    let paths = [
        ("idx_train_images", &cfg.idx_train_images),
        ("idx_train_labels", &cfg.idx_train_labels),
        ("idx_test_images", &cfg.idx_test_images),
        ("idx_test_labels", &cfg.idx_test_labels),
        ("idx_ood_images", &cfg.idx_ood_images),
    ];
    let set_count = paths.iter().filter(|(_, p)| !p.is_empty()).count();
    if set_count == 0 {
        let defaults = ClusterConfig::default();
        let class_count = defaults.class_count();
        let clusters = ClusterConfig {
            stddevs: vec![cfg.cluster_stddev; class_count],
            train_per_class: cfg.train_per_class,
            test_per_class: cfg.test_per_class,
            ..defaults
        }
        .with_shift_magnitude(cfg.shift_sigmas * cfg.cluster_stddev);
        let (train_set, test_set, ood_set) = sample_clusters(&clusters, rng)?;
        return Ok((train_set, test_set, ood_set.inputs, "clusters"));
    }
    if set_count < paths.len() {
        let missing: Vec<&str> = paths
            .iter()
            .filter(|(_, p)| p.is_empty())
            .map(|(name, _)| *name)
            .collect();
        return Err(Error::Config(format!(
            "IDX sources need all five paths; missing {}",
            missing.join(", ")
        )));
    }
    let train_set = load_idx(cfg.idx_train_images.as_ref(), cfg.idx_train_labels.as_ref())?;
    let test_set = load_idx(cfg.idx_test_images.as_ref(), cfg.idx_test_labels.as_ref())?;
    let ood_inputs = parse_idx_images(&std::fs::read(&cfg.idx_ood_images)?)?;
    if test_set.targets.cols() > train_set.targets.cols() {
        return Err(Error::Config(format!(
            "test labels use {} classes but training only has {}",
            test_set.targets.cols(),
            train_set.targets.cols()
        )));
    }
    if ood_inputs.cols() != train_set.inputs.cols() {
        return Err(Error::shape(
            "OOD images disagree with training images on pixel count",
            (train_set.inputs.rows(), train_set.inputs.cols()),
            (ood_inputs.rows(), ood_inputs.cols()),
        ));
    }
    Ok((train_set, test_set, ood_inputs, "idx"))
}

/// Per-column mean and stddev of the training inputs; constant columns get
/// a unit stddev so standardization leaves them at zero.
fn column_stats(inputs: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let n = inputs.rows() as f64;
    let mut means = vec![0.0; inputs.cols()];
    for row in inputs.iter_rows() {
        for (acc, v) in means.iter_mut().zip(row) {
            *acc += v / n;
        }
    }
    let mut stds = vec![0.0; inputs.cols()];
    for row in inputs.iter_rows() {
        for ((acc, v), m) in stds.iter_mut().zip(row).zip(&means) {
            *acc += (v - m) * (v - m) / n;
        }
    }
    for s in &mut stds {
        *s = s.sqrt();
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    (means, stds)
}

fn standardize(inputs: &Matrix, means: &[f64], stds: &[f64]) -> Matrix {
    Matrix::from_fn(inputs.rows(), inputs.cols(), |r, c| {
        (inputs.get(r, c) - means[c]) / stds[c]
    })
}

/// Row-normalized class distributions from averaged MC-dropout outputs.
fn class_distributions(mean_outputs: &Matrix) -> Matrix {
    Matrix::from_fn(mean_outputs.rows(), mean_outputs.cols(), |r, c| {
        let total: f64 = mean_outputs.row(r).iter().sum();
        mean_outputs.get(r, c) / total
    })
}

/// Classifier with predictive entropy as the OOD score: train with dropout,
/// average stochastic forward passes, and compare the entropy distributions
/// of the in-distribution test set and the shifted set.
fn run_ood_classify(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let base = RngState::new(cfg.seed);
    let (train_set, test_set, ood_inputs, source) =
        classify_data(cfg, &mut base.derive(DATA_STREAM))?;
    let classes = train_set.targets.cols();

    // Standardize all inputs to the training set's statistics; raw
    // coordinates would saturate the first hidden layer and erase the
    // distance information the OOD score depends on.
    let (means, stds) = column_stats(&train_set.inputs);
    let train_inputs = standardize(&train_set.inputs, &means, &stds);
    let test_inputs = standardize(&test_set.inputs, &means, &stds);
    let ood_std_inputs = standardize(&ood_inputs, &means, &stds);

    let mut dims = vec![train_set.inputs.cols()];
    dims.extend_from_slice(&cfg.hidden);
    dims.push(classes);
    let mut net = Mlp::single(
        &dims,
        cfg.activation,
        Activation::Sigmoid,
        &mut base.derive(INIT_STREAM),
    )?;
    train(
        &mut net,
        &train_inputs,
        &train_set.targets,
        &cfg.train_config(),
        Loss::Mse,
    )?;

    let mut mc_rng = base.derive(MC_STREAM);
    let mut entropies = |inputs: &Matrix| -> Result<(Vec<f64>, Matrix)> {
        let pred = mc_dropout_predict(&net, inputs, cfg.dropout_rate, cfg.mc_samples, &mut mc_rng)?;
        let probs = class_distributions(&pred.mean);
        let mut values = Vec::with_capacity(probs.rows());
        for r in 0..probs.rows() {
            values.push(entropy(probs.row(r))?);
        }
        Ok((values, probs))
    };
    let (id_entropies, id_probs) = entropies(&test_inputs)?;
    let (ood_entropies, _) = entropies(&ood_std_inputs)?;

    let max_entropy = (classes as f64).ln();
    let id_hist = histogram(&id_entropies, cfg.histogram_bins, (0.0, max_entropy))?;
    let ood_hist = histogram(&ood_entropies, cfg.histogram_bins, (0.0, max_entropy))?;
    let curve = roc(&id_entropies, &ood_entropies)?;

    let true_classes: Vec<usize> = (0..test_set.targets.rows())
        .map(|r| argmax(test_set.targets.row(r)))
        .collect();
    let predicted: Vec<usize> = (0..id_probs.rows()).map(|r| argmax(id_probs.row(r))).collect();
    let correct: Vec<bool> = predicted
        .iter()
        .zip(&true_classes)
        .map(|(p, t)| p == t)
        .collect();
    let confidences: Vec<f64> = (0..id_probs.rows())
        .map(|r| id_probs.row(r)[predicted[r]])
        .collect();
    let accuracy =
        correct.iter().filter(|c| **c).count() as f64 / correct.len().max(1) as f64;
    let calibration = reliability(&confidences, &correct, cfg.reliability_bins)?;
    let brier_score = brier(&id_probs, &true_classes)?;

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    Ok(RunOutput {
        csv: render_histograms(&[("id", &id_hist), ("ood", &ood_hist)]),
        summary: vec![
            ("source", source.to_string()),
            ("classes", classes.to_string()),
            ("auroc", fmt(curve.auroc)),
            ("youden_threshold", fmt(curve.youden_threshold)),
            ("id_mean_entropy", fmt(mean(&id_entropies))),
            ("ood_mean_entropy", fmt(mean(&ood_entropies))),
            ("id_accuracy", fmt(accuracy)),
            ("id_ece", fmt(calibration.ece)),
            ("id_brier", fmt(brier_score)),
        ],
        extras: vec![("roc", render_roc(&curve))],
    })
}
