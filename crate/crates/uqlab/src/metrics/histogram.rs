//! Fixed-range histograms for comparing score distributions.

use crate::error::{Error, Result};

/// Counts of values in equal-width bins over a fixed range. Bins are
/// half-open [lo, hi) except the last, which also includes the top edge.
/// Values outside the range are tallied separately, never dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
    pub below: usize,
    pub above: usize,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    /// Inclusive lower edge of bin `b`.
    pub fn bin_lo(&self, b: usize) -> f64 {
        self.lo + b as f64 * self.bin_width()
    }
}

/// Count values into `bins` equal-width bins spanning `range`.
pub fn histogram(values: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    let (lo, hi) = range;
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::Config(format!(
            "invalid histogram range [{lo}, {hi}]"
        )));
    }
    if values.is_empty() {
        return Err(Error::Domain(
            "histogram requires at least one value".into(),
        ));
    }
    let mut counts = vec![0usize; bins];
    let mut below = 0;
    let mut above = 0;
    let width = (hi - lo) / bins as f64;
    for &v in values {
        if !v.is_finite() {
            return Err(Error::Domain(format!("histogram value {v} is not finite")));
        }
        if v < lo {
            below += 1;
        } else if v > hi {
            above += 1;
        } else {
            // v == hi maps past the end; clamp folds it into the last bin.
            let idx = (((v - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
    }
    Ok(Histogram {
        lo,
        hi,
        counts,
        below,
        above,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_value_lands_in_one_bin() {
        let h = histogram(&[0.25], 4, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts, vec![0, 1, 0, 0]);
        assert_eq!((h.below, h.above), (0, 0));
    }

    #[test]
    fn even_grid_fills_bins_equally() {
        let values: Vec<f64> = (0..40).map(|i| (i as f64 + 0.5) / 40.0).collect();
        let h = histogram(&values, 8, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts, vec![5; 8]);
    }

    #[test]
    fn top_edge_belongs_to_last_bin() {
        let h = histogram(&[1.0], 4, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts, vec![0, 0, 0, 1]);
    }

    #[test]
    fn lower_edge_of_interior_bin_is_inclusive() {
        let h = histogram(&[0.5], 2, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts, vec![0, 1]);
    }

    #[test]
    fn out_of_range_values_reported_separately() {
        let h = histogram(&[-1.0, 0.5, 2.0, 3.0], 2, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts, vec![0, 1]);
        assert_eq!(h.below, 1);
        assert_eq!(h.above, 2);
    }

    #[test]
    fn invalid_arguments_rejected() {
        assert!(histogram(&[], 4, (0.0, 1.0)).is_err());
        assert!(histogram(&[0.5], 0, (0.0, 1.0)).is_err());
        assert!(histogram(&[0.5], 4, (1.0, 0.0)).is_err());
        assert!(histogram(&[0.5], 4, (0.0, 0.0)).is_err());
        assert!(histogram(&[f64::NAN], 4, (0.0, 1.0)).is_err());
    }

    #[test]
    fn bin_edges_follow_width() {
        let h = histogram(&[2.0], 4, (0.0, 8.0)).unwrap();
        assert_eq!(h.bin_width(), 2.0);
        assert_eq!(h.bin_lo(0), 0.0);
        assert_eq!(h.bin_lo(3), 6.0);
    }

    proptest! {
        // Every input value is either binned or tallied as out of range.
        #[test]
        fn counts_conserve_sample_count(
            values in prop::collection::vec(-2.0f64..3.0, 1..80),
            bins in 1usize..12,
        ) {
            let h = histogram(&values, bins, (0.0, 1.0)).unwrap();
            let binned: usize = h.counts.iter().sum();
            prop_assert_eq!(binned + h.below + h.above, values.len());
            let in_range = values.iter().filter(|&&v| (0.0..=1.0).contains(&v)).count();
            prop_assert_eq!(binned, in_range);
        }
    }
}
