//! Wall-clock scaling of stochastic-network prediction.
//!
//! Sweeps a grid of (depth, width, sample count) cells, timing
//! [`stochastic_predict`] in each, to show how Monte-Carlo prediction cost
//! grows with architecture size. Cells whose projected cost exceeds the
//! per-cell budget (or the memory ceiling) are recorded as truncated rather
//! than run; truncation is part of the result, demonstrating where exact
//! scaling becomes impractical.
//!
//! Timed regions are strictly single-threaded and use a monotonic clock.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::Activation;
use crate::rng::RngState;
use crate::uq::{stochastic_predict, StochasticNet};

/// Estimated peak working-set bytes per network parameter during a timed
/// cell (distribution storage, flattened copies, sampled network).
const BYTES_PER_PARAM: u64 = 48;

/// Cells whose estimated working set exceeds this are truncated without
/// being built, so an oversized grid degrades to `timeout` rows instead of
/// exhausting memory.
pub const CELL_MEMORY_CEILING_BYTES: u64 = 2 * 1024 * 1024 * 1024;

/// Grid and measurement settings for the scaling sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    /// Hidden-layer counts, strictly increasing.
    pub depths: Vec<usize>,
    /// Hidden-layer widths, strictly increasing.
    pub widths: Vec<usize>,
    /// Monte-Carlo sample counts, strictly increasing.
    pub sample_counts: Vec<usize>,
    /// Timed runs per cell (a warmup run is added and excluded).
    pub repeats: usize,
    pub seed: u64,
    /// Wall-time budget per cell in seconds; cells projected or measured
    /// to exceed it are truncated.
    pub budget_seconds: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            depths: vec![2, 4, 8, 16, 32, 64],
            widths: vec![16, 32, 64, 128, 256, 512, 1024, 2048],
            sample_counts: vec![1, 10, 100, 1000],
            repeats: 3,
            seed: 0,
            budget_seconds: 30.0,
        }
    }
}

impl ScalingConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, list) in [
            ("depths", &self.depths),
            ("widths", &self.widths),
            ("sample_counts", &self.sample_counts),
        ] {
            if list.is_empty() {
                return Err(Error::Config(format!("{name} list is empty")));
            }
            if list[0] == 0 {
                return Err(Error::Config(format!("{name} entries must be positive")));
            }
            if list.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config(format!(
                    "{name} list must be strictly increasing"
                )));
            }
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if !self.budget_seconds.is_finite() || self.budget_seconds <= 0.0 {
            return Err(Error::Config(format!(
                "budget_seconds must be positive, got {}",
                self.budget_seconds
            )));
        }
        Ok(())
    }
}

/// One measured (or truncated) grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRecord {
    pub depth: usize,
    pub width: usize,
    pub n_samples: usize,
    /// Parameter count of the timed network.
    pub params: usize,
    /// Wall time of each completed repeat, in seconds; may be partial (or
    /// empty) when the cell was truncated.
    pub repeat_seconds: Vec<f64>,
    /// Median over all repeats; `None` marks a truncated cell.
    pub median_seconds: Option<f64>,
}

/// Parameters of a dense net `input -> width x depth -> output`: every
/// layer contributes a weight matrix plus one bias per output unit.
pub fn dense_param_count(input_dim: usize, depth: usize, width: usize, output_dim: usize) -> usize {
    let first = input_dim * width + width;
    let hidden = (depth - 1) * (width * width + width);
    let out = width * output_dim + output_dim;
    first + hidden + out
}

fn median(sorted_scratch: &mut [f64]) -> f64 {
    sorted_scratch.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    let n = sorted_scratch.len();
    if n % 2 == 1 {
        sorted_scratch[n / 2]
    } else {
        (sorted_scratch[n / 2 - 1] + sorted_scratch[n / 2]) / 2.0
    }
}

/// Measures seconds per (parameter x sample) on a small probe net, used to
/// project cell costs before building them.
fn calibrate_unit_cost(seed: u64) -> Result<f64> {
    let mut rng = RngState::new(seed).derive(0x6265_6e63);
    let net = StochasticNet::random(&[1, 64, 64, 1], 0.1, Activation::Tanh, &mut rng)?;
    let inputs = Matrix::from_vec(1, 1, vec![0.5])?;
    let params = net.param_count();
    let samples = 50;
    stochastic_predict(&net, &inputs, samples, &mut rng)?;
    let mut times = [0.0; 3];
    for slot in &mut times {
        let start = Instant::now();
        stochastic_predict(&net, &inputs, samples, &mut rng)?;
        *slot = start.elapsed().as_secs_f64();
    }
    Ok(median(&mut times) / (params as f64 * samples as f64))
}

/// Sweeps the full (depth, width, sample count) grid, timing each cell's
/// Monte-Carlo prediction over `repeats` runs after one untimed warmup.
///
/// A cell is truncated (recorded with `median_seconds = None`) when its
/// projected cost exceeds the budget, when its elapsed time crosses the
/// budget mid-cell, or when the network would exceed the memory ceiling.
pub fn run_scaling(cfg: &ScalingConfig) -> Result<Vec<ScalingRecord>> {
    cfg.validate()?;
    let unit_cost = calibrate_unit_cost(cfg.seed)?;
    let inputs = Matrix::from_vec(1, 1, vec![0.5])?;
    let base = RngState::new(cfg.seed);
    let mut records = Vec::new();
    let mut cell_tag = 0u64;

    for &depth in &cfg.depths {
        for &width in &cfg.widths {
            let params = dense_param_count(1, depth, width, 1);
            let over_memory = params as u64 * BYTES_PER_PARAM > CELL_MEMORY_CEILING_BYTES;
            // Built lazily so fully truncated rows never allocate the net.
            let mut net: Option<StochasticNet> = None;
            for &n_samples in &cfg.sample_counts {
                cell_tag += 1;
                // Warmup plus repeats all pay the per-sample cost.
                let projected = (cfg.repeats + 1) as f64
                    * n_samples as f64
                    * params as f64
                    * unit_cost;
                if over_memory || projected > cfg.budget_seconds {
                    records.push(ScalingRecord {
                        depth,
                        width,
                        n_samples,
                        params,
                        repeat_seconds: Vec::new(),
                        median_seconds: None,
                    });
                    continue;
                }
                if net.is_none() {
                    let mut net_rng = base.derive(((depth as u64) << 32) | width as u64);
                    let mut dims = vec![1];
                    dims.extend(std::iter::repeat(width).take(depth));
                    dims.push(1);
                    net = Some(StochasticNet::random(
                        &dims,
                        0.1,
                        Activation::Tanh,
                        &mut net_rng,
                    )?);
                }
                let net = net.as_ref().expect("built above");
                let mut predict_rng = base.derive(cell_tag);

                let cell_start = Instant::now();
                stochastic_predict(net, &inputs, n_samples, &mut predict_rng)?;
                let mut repeat_seconds = Vec::with_capacity(cfg.repeats);
                let mut truncated = cell_start.elapsed().as_secs_f64() > cfg.budget_seconds;
                while !truncated && repeat_seconds.len() < cfg.repeats {
                    let start = Instant::now();
                    stochastic_predict(net, &inputs, n_samples, &mut predict_rng)?;
                    repeat_seconds.push(start.elapsed().as_secs_f64());
                    truncated = repeat_seconds.len() < cfg.repeats
                        && cell_start.elapsed().as_secs_f64() > cfg.budget_seconds;
                }
                let median_seconds = if truncated {
                    None
                } else {
                    let mut scratch = repeat_seconds.clone();
                    Some(median(&mut scratch))
                };
                records.push(ScalingRecord {
                    depth,
                    width,
                    n_samples,
                    params,
                    repeat_seconds,
                    median_seconds,
                });
            }
        }
    }
    Ok(records)
}

/// Counts strict decreases of median time between consecutive measured
/// cells along the sample-count axis of one fixed (depth, width) net.
pub fn sample_axis_inversions(records: &[ScalingRecord], depth: usize, width: usize) -> usize {
    let mut line: Vec<(usize, f64)> = records
        .iter()
        .filter(|r| r.depth == depth && r.width == width)
        .filter_map(|r| r.median_seconds.map(|m| (r.n_samples, m)))
        .collect();
    line.sort_by_key(|&(n, _)| n);
    line.windows(2).filter(|w| w[1].1 < w[0].1).count()
}

/// Least-squares slope of log(median time) against log(width) over the
/// three largest measured widths of one (depth, n_samples) line, or `None`
/// when fewer than three widths completed.
pub fn width_scaling_slope(
    records: &[ScalingRecord],
    depth: usize,
    n_samples: usize,
) -> Option<f64> {
    let mut line: Vec<(usize, f64)> = records
        .iter()
        .filter(|r| r.depth == depth && r.n_samples == n_samples)
        .filter_map(|r| r.median_seconds.map(|m| (r.width, m)))
        .filter(|&(_, m)| m > 0.0)
        .collect();
    if line.len() < 3 {
        return None;
    }
    line.sort_by_key(|&(w, _)| w);
    let tail = &line[line.len() - 3..];
    let xs: Vec<f64> = tail.iter().map(|&(w, _)| (w as f64).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, m)| m.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 3.0;
    let my = ys.iter().sum::<f64>() / 3.0;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(num / den)
}

fn join_usize(list: &[usize]) -> String {
    list.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Renders the sweep as semicolon-separated CSV with the configuration
/// echoed in `#` comment lines. Truncated cells carry the sentinel
/// `timeout` in the median column.
pub fn emit_scaling_report(cfg: &ScalingConfig, records: &[ScalingRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Domain("no scaling records to report".into()));
    }
    let mut out = String::new();
    out.push_str(&format!("# depths = {}\n", join_usize(&cfg.depths)));
    out.push_str(&format!("# widths = {}\n", join_usize(&cfg.widths)));
    out.push_str(&format!(
        "# sample_counts = {}\n",
        join_usize(&cfg.sample_counts)
    ));
    out.push_str(&format!("# repeats = {}\n", cfg.repeats));
    out.push_str(&format!("# seed = {}\n", cfg.seed));
    out.push_str(&format!("# budget_seconds = {}\n", cfg.budget_seconds));
    out.push_str("depth;width;n_samples;params;median_seconds;all_repeats\n");
    for r in records {
        let median = match r.median_seconds {
            Some(m) => m.to_string(),
            None => "timeout".to_string(),
        };
        let repeats = r
            .repeat_seconds
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!(
            "{};{};{};{};{};{}\n",
            r.depth, r.width, r.n_samples, r.params, median, repeats
        ));
    }
    Ok(out)
}

fn parse_usize_list(raw: &str, what: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|e| Error::Domain(format!("scaling report: bad {what} entry {tok:?}: {e}")))
        })
        .collect()
}

/// Parses text produced by [`emit_scaling_report`] back into the
/// configuration and records; the pair round-trips exactly.
pub fn parse_scaling_report(text: &str) -> Result<(ScalingConfig, Vec<ScalingRecord>)> {
    let mut cfg = ScalingConfig::default();
    let mut records = Vec::new();
    let mut header_seen = false;
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            let (key, value) = comment
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("scaling report: bad comment {line:?}")))?;
            let value = value.trim();
            match key.trim() {
                "depths" => cfg.depths = parse_usize_list(value, "depth")?,
                "widths" => cfg.widths = parse_usize_list(value, "width")?,
                "sample_counts" => cfg.sample_counts = parse_usize_list(value, "sample count")?,
                "repeats" => {
                    cfg.repeats = value.parse().map_err(|e| {
                        Error::Domain(format!("scaling report: bad repeats {value:?}: {e}"))
                    })?
                }
                "seed" => {
                    cfg.seed = value.parse().map_err(|e| {
                        Error::Domain(format!("scaling report: bad seed {value:?}: {e}"))
                    })?
                }
                "budget_seconds" => {
                    cfg.budget_seconds = value.parse().map_err(|e| {
                        Error::Domain(format!("scaling report: bad budget {value:?}: {e}"))
                    })?
                }
                other => {
                    return Err(Error::Domain(format!(
                        "scaling report: unknown config key {other:?}"
                    )))
                }
            }
            continue;
        }
        if !header_seen {
            if line != "depth;width;n_samples;params;median_seconds;all_repeats" {
                return Err(Error::Domain(format!(
                    "scaling report: unexpected header {line:?}"
                )));
            }
            header_seen = true;
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(';').collect();
        if fields.len() != 6 {
            return Err(Error::Domain(format!(
                "scaling report: expected 6 fields, got {} in {line:?}",
                fields.len()
            )));
        }
        let parse_cell = |tok: &str, what: &str| -> Result<usize> {
            tok.parse::<usize>()
                .map_err(|e| Error::Domain(format!("scaling report: bad {what} {tok:?}: {e}")))
        };
        let median_seconds = if fields[4] == "timeout" {
            None
        } else {
            Some(fields[4].parse::<f64>().map_err(|e| {
                Error::Domain(format!("scaling report: bad median {:?}: {e}", fields[4]))
            })?)
        };
        let repeat_seconds = if fields[5].is_empty() {
            Vec::new()
        } else {
            fields[5]
                .split(',')
                .map(|tok| {
                    tok.parse::<f64>().map_err(|e| {
                        Error::Domain(format!("scaling report: bad repeat time {tok:?}: {e}"))
                    })
                })
                .collect::<Result<Vec<f64>>>()?
        };
        records.push(ScalingRecord {
            depth: parse_cell(fields[0], "depth")?,
            width: parse_cell(fields[1], "width")?,
            n_samples: parse_cell(fields[2], "n_samples")?,
            params: parse_cell(fields[3], "params")?,
            repeat_seconds,
            median_seconds,
        });
    }
    if !header_seen {
        return Err(Error::Domain("scaling report: missing header row".into()));
    }
    Ok((cfg, records))
}
