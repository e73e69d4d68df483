//! CSV artifacts shared by every experiment.
//!
//! One dialect throughout: `;` separates fields, `.` is the decimal mark,
//! the first line is the header, and rows carry no trailing separator.
//! Floats are written with Rust's shortest round-trip formatting, so
//! parsing a rendered file reproduces the original values bit for bit.

use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::{Histogram, RocCurve};

pub const BASELINE_HEADER: &str = "x;pred_mu;true_mu";
pub const CURVE_HEADER: &str = "x;pred_mu;true_mu;pred_sigma;pred_sigma_ale;pred_sigma_epi";
pub const SAMPLE_HEADER: &str = "sample;x;y_stochastic;y_deterministic";
pub const HISTOGRAM_HEADER: &str = "set;bin_lo;bin_hi;count";
pub const ROC_HEADER: &str = "fpr;tpr";

/// Absolute slack allowed in the per-row variance decomposition.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-9;

/// Point on a mean-only prediction curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineRow {
    pub x: f64,
    pub pred_mu: f64,
    pub true_mu: f64,
}

/// Point on an uncertainty-decomposed prediction curve. The sigma columns
/// are standard deviations; the additivity contract lives on variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionCurveRow {
    pub x: f64,
    pub pred_mu: f64,
    pub true_mu: f64,
    pub pred_sigma: f64,
    pub pred_sigma_ale: f64,
    pub pred_sigma_epi: f64,
}

impl RegressionCurveRow {
    /// Builds a row from the variance decomposition, converting to the
    /// standard deviations the file stores.
    pub fn from_variances(
        x: f64,
        pred_mu: f64,
        true_mu: f64,
        aleatoric: f64,
        epistemic: f64,
    ) -> RegressionCurveRow {
        RegressionCurveRow {
            x,
            pred_mu,
            true_mu,
            pred_sigma: (aleatoric + epistemic).sqrt(),
            pred_sigma_ale: aleatoric.sqrt(),
            pred_sigma_epi: epistemic.sqrt(),
        }
    }

    /// Checks that total variance equals aleatoric plus epistemic variance.
    pub fn check_decomposition(&self) -> Result<()> {
        let total = self.pred_sigma * self.pred_sigma;
        let parts = self.pred_sigma_ale * self.pred_sigma_ale
            + self.pred_sigma_epi * self.pred_sigma_epi;
        if (total - parts).abs() > DECOMPOSITION_TOLERANCE {
            return Err(Error::Domain(format!(
                "variance decomposition violated at x = {}: total {total} vs sum of parts {parts}",
                self.x
            )));
        }
        Ok(())
    }
}

/// One network draw evaluated at one probe input.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub sample: usize,
    pub x: f64,
    pub y_stochastic: f64,
    pub y_deterministic: f64,
}

/// One histogram bin, tagged with the data set it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRow {
    pub set: String,
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: usize,
}

pub fn render_baseline(rows: &[BaselineRow]) -> String {
    let mut out = String::from(BASELINE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{};{};{}\n", r.x, r.pred_mu, r.true_mu));
    }
    out
}

pub fn parse_baseline(text: &str) -> Result<Vec<BaselineRow>> {
    let mut lines = text.lines();
    expect_header(lines.next(), BASELINE_HEADER)?;
    lines
        .enumerate()
        .map(|(i, line)| {
            let f = split_fields(line, 3, i + 2)?;
            Ok(BaselineRow {
                x: parse_f64(f[0], i + 2)?,
                pred_mu: parse_f64(f[1], i + 2)?,
                true_mu: parse_f64(f[2], i + 2)?,
            })
        })
        .collect()
}

pub fn render_curve(rows: &[RegressionCurveRow]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{};{};{};{};{};{}\n",
            r.x, r.pred_mu, r.true_mu, r.pred_sigma, r.pred_sigma_ale, r.pred_sigma_epi
        ));
    }
    out
}

pub fn parse_curve(text: &str) -> Result<Vec<RegressionCurveRow>> {
    let mut lines = text.lines();
    expect_header(lines.next(), CURVE_HEADER)?;
    lines
        .enumerate()
        .map(|(i, line)| {
            let f = split_fields(line, 6, i + 2)?;
            Ok(RegressionCurveRow {
                x: parse_f64(f[0], i + 2)?,
                pred_mu: parse_f64(f[1], i + 2)?,
                true_mu: parse_f64(f[2], i + 2)?,
                pred_sigma: parse_f64(f[3], i + 2)?,
                pred_sigma_ale: parse_f64(f[4], i + 2)?,
                pred_sigma_epi: parse_f64(f[5], i + 2)?,
            })
        })
        .collect()
}

pub fn render_samples(rows: &[SampleRow]) -> String {
    let mut out = String::from(SAMPLE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{};{};{};{}\n",
            r.sample, r.x, r.y_stochastic, r.y_deterministic
        ));
    }
    out
}

pub fn parse_samples(text: &str) -> Result<Vec<SampleRow>> {
    let mut lines = text.lines();
    expect_header(lines.next(), SAMPLE_HEADER)?;
    lines
        .enumerate()
        .map(|(i, line)| {
            let f = split_fields(line, 4, i + 2)?;
            Ok(SampleRow {
                sample: parse_usize(f[0], i + 2)?,
                x: parse_f64(f[1], i + 2)?,
                y_stochastic: parse_f64(f[2], i + 2)?,
                y_deterministic: parse_f64(f[3], i + 2)?,
            })
        })
        .collect()
}

/// Renders one or more labeled histograms into a single table.
pub fn render_histograms(sets: &[(&str, &Histogram)]) -> String {
    let mut out = String::from(HISTOGRAM_HEADER);
    out.push('\n');
    for (label, hist) in sets {
        let width = hist.bin_width();
        for (b, count) in hist.counts.iter().enumerate() {
            let lo = hist.bin_lo(b);
            out.push_str(&format!("{label};{lo};{};{count}\n", lo + width));
        }
    }
    out
}

pub fn parse_histograms(text: &str) -> Result<Vec<HistogramRow>> {
    let mut lines = text.lines();
    expect_header(lines.next(), HISTOGRAM_HEADER)?;
    lines
        .enumerate()
        .map(|(i, line)| {
            let f = split_fields(line, 4, i + 2)?;
            Ok(HistogramRow {
                set: f[0].to_string(),
                bin_lo: parse_f64(f[1], i + 2)?,
                bin_hi: parse_f64(f[2], i + 2)?,
                count: parse_usize(f[3], i + 2)?,
            })
        })
        .collect()
}

pub fn render_roc(curve: &RocCurve) -> String {
    let mut out = String::from(ROC_HEADER);
    out.push('\n');
    for (fpr, tpr) in &curve.points {
        out.push_str(&format!("{fpr};{tpr}\n"));
    }
    out
}

pub fn parse_roc(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    expect_header(lines.next(), ROC_HEADER)?;
    lines
        .enumerate()
        .map(|(i, line)| {
            let f = split_fields(line, 2, i + 2)?;
            Ok((parse_f64(f[0], i + 2)?, parse_f64(f[1], i + 2)?))
        })
        .collect()
}

/// Renders summary statistics as `key = value` lines in the given order.
pub fn render_summary(pairs: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (key, value) in pairs {
        out.push_str(&format!("{key} = {value}\n"));
    }
    out
}

/// Parses summary text back into ordered pairs.
pub fn parse_summary(text: &str) -> Result<Vec<(String, String)>> {
    super::config::parse_config_pairs(text)
}

/// Looks up a summary key and parses it as a float.
pub fn summary_f64(pairs: &[(String, String)], key: &str) -> Result<f64> {
    let (_, value) = pairs
        .iter()
        .find(|(k, _)| k == key)
        .ok_or_else(|| Error::Domain(format!("summary is missing key '{key}'")))?;
    value
        .parse()
        .map_err(|e| Error::Domain(format!("summary key '{key}' is not numeric: {value:?} ({e})")))
}

/// Writes a whole file through a sibling temp file and a rename, so readers
/// never observe a half-written artifact.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Domain(format!("not a writable path: {}", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn expect_header(line: Option<&str>, want: &str) -> Result<()> {
    match line {
        Some(got) if got == want => Ok(()),
        Some(got) => Err(Error::Domain(format!(
            "bad CSV header: expected {want:?}, got {got:?}"
        ))),
        None => Err(Error::Domain("empty CSV text".into())),
    }
}

fn split_fields(line: &str, expected: usize, lineno: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.split(';').collect();
    if fields.len() != expected {
        return Err(Error::Domain(format!(
            "CSV line {lineno}: expected {expected} fields, got {}",
            fields.len()
        )));
    }
    Ok(fields)
}

fn parse_f64(field: &str, lineno: usize) -> Result<f64> {
    field
        .parse()
        .map_err(|e| Error::Domain(format!("CSV line {lineno}: bad number {field:?} ({e})")))
}

fn parse_usize(field: &str, lineno: usize) -> Result<usize> {
    field
        .parse()
        .map_err(|e| Error::Domain(format!("CSV line {lineno}: bad count {field:?} ({e})")))
}
