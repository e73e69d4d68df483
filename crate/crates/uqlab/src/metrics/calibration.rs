//! Reliability binning and expected calibration error.

use crate::error::{Error, Result};

/// Default number of equal-width confidence bins.
pub const DEFAULT_RELIABILITY_BINS: usize = 15;

/// One confidence interval of a reliability diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityBin {
    /// Inclusive lower edge of the confidence interval.
    pub lo: f64,
    /// Exclusive upper edge; inclusive for the last bin.
    pub hi: f64,
    /// Mean predicted confidence of the samples in the bin (0 when empty).
    pub mean_confidence: f64,
    /// Fraction of the bin's samples that were correct (0 when empty).
    pub accuracy: f64,
    /// Number of samples in the bin.
    pub count: usize,
}

/// Reliability diagram plus its expected calibration error: the
/// count-weighted mean absolute gap between accuracy and confidence over
/// non-empty bins.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityReport {
    pub bins: Vec<ReliabilityBin>,
    pub ece: f64,
}

/// Bin predictions by confidence and compare confidence to empirical
/// accuracy in each bin.
pub fn reliability(
    confidences: &[f64],
    correct: &[bool],
    bins: usize,
) -> Result<ReliabilityReport> {
    if bins == 0 {
        return Err(Error::Config("reliability needs at least one bin".into()));
    }
    if confidences.len() != correct.len() {
        return Err(Error::shape(
            "reliability",
            (confidences.len(), 1),
            (correct.len(), 1),
        ));
    }
    if confidences.is_empty() {
        return Err(Error::Domain(
            "reliability requires at least one sample".into(),
        ));
    }
    for &c in confidences {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::Domain(format!("confidence {c} outside [0, 1]")));
        }
    }

    let mut count = vec![0usize; bins];
    let mut conf_sum = vec![0.0; bins];
    let mut hits = vec![0usize; bins];
    for (&c, &ok) in confidences.iter().zip(correct) {
        // Confidence exactly 1 belongs to the last bin.
        let idx = ((c * bins as f64) as usize).min(bins - 1);
        count[idx] += 1;
        conf_sum[idx] += c;
        hits[idx] += ok as usize;
    }

    let n = confidences.len() as f64;
    let width = 1.0 / bins as f64;
    let mut report_bins = Vec::with_capacity(bins);
    let mut ece = 0.0;
    for b in 0..bins {
        let (mean_confidence, accuracy) = if count[b] > 0 {
            (
                conf_sum[b] / count[b] as f64,
                hits[b] as f64 / count[b] as f64,
            )
        } else {
            (0.0, 0.0)
        };
        if count[b] > 0 {
            ece += count[b] as f64 / n * (accuracy - mean_confidence).abs();
        }
        report_bins.push(ReliabilityBin {
            lo: b as f64 * width,
            hi: (b + 1) as f64 * width,
            mean_confidence,
            accuracy,
            count: count[b],
        });
    }
    Ok(ReliabilityReport {
        bins: report_bins,
        ece,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;

    #[test]
    fn confident_and_correct_is_perfectly_calibrated() {
        let conf = vec![1.0; 8];
        let correct = vec![true; 8];
        let report = reliability(&conf, &correct, DEFAULT_RELIABILITY_BINS).unwrap();
        assert_eq!(report.ece, 0.0);
        assert_eq!(report.bins.len(), DEFAULT_RELIABILITY_BINS);
        assert_eq!(report.bins.last().unwrap().count, 8);
    }

    #[test]
    fn overconfident_half_right_gap_is_point_four() {
        let conf = vec![0.9; 10];
        let correct: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        let report = reliability(&conf, &correct, 10).unwrap();
        assert!((report.ece - 0.4).abs() < 1e-12);
    }

    #[test]
    fn bin_counts_conserve_samples() {
        let conf = [0.05, 0.15, 0.15, 0.5, 0.999, 1.0];
        let correct = [false, true, false, true, true, true];
        let report = reliability(&conf, &correct, 10).unwrap();
        let total: usize = report.bins.iter().map(|b| b.count).sum();
        assert_eq!(total, conf.len());
        assert_eq!(report.bins[0].count, 1);
        assert_eq!(report.bins[1].count, 2);
        assert_eq!(report.bins[9].count, 2);
    }

    // Construct bins where accuracy equals mean confidence exactly; the gap
    // vanishes even though individual predictions are far from certain.
    #[test]
    fn matching_accuracy_and_confidence_zeroes_ece() {
        let conf = [0.25, 0.25, 0.25, 0.25, 0.75, 0.75, 0.75, 0.75];
        let correct = [true, false, false, false, true, true, true, false];
        let report = reliability(&conf, &correct, 2).unwrap();
        assert!(report.ece.abs() < 1e-12);
    }

    // Simulation oracle of perfect calibration: when correctness is drawn as
    // Bernoulli(confidence), every bin's accuracy converges to its mean
    // confidence, so the calibration error shrinks toward zero.
    #[test]
    fn bernoulli_confidence_sampler_is_nearly_calibrated() {
        let mut rng = RngState::new(11);
        let n = 100_000;
        let mut conf = Vec::with_capacity(n);
        let mut correct = Vec::with_capacity(n);
        for _ in 0..n {
            let c = rng.uniform();
            conf.push(c);
            correct.push(rng.bernoulli(c));
        }
        let report = reliability(&conf, &correct, DEFAULT_RELIABILITY_BINS).unwrap();
        assert!(report.ece < 0.02, "ece = {}", report.ece);
    }

    #[test]
    fn invalid_arguments_rejected() {
        assert!(reliability(&[0.5], &[true], 0).is_err());
        assert!(reliability(&[0.5, 0.5], &[true], 10).is_err());
        assert!(reliability(&[], &[], 10).is_err());
        assert!(reliability(&[1.5], &[true], 10).is_err());
        assert!(reliability(&[-0.1], &[true], 10).is_err());
        assert!(reliability(&[f64::NAN], &[true], 10).is_err());
    }
}
