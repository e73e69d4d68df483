//! Synthetic Gaussian-blob classification data with a translated
//! out-of-distribution copy; a desk-scale stand-in for image OOD protocols.

use crate::data::{LabeledSet, SetTag};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::RngState;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    /// One center per class; all centers share the input dimension.
    pub centers: Vec<Vec<f64>>,
    /// Isotropic stddev per class.
    pub stddevs: Vec<f64>,
    pub train_per_class: usize,
    pub test_per_class: usize,
    /// Translation applied to every class to build the OOD set.
    pub shift: Vec<f64>,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        // Four well-separated blobs on a square; the OOD copy is shifted by
        // six stddevs along the diagonal.
        let s = 6.0 / 2.0_f64.sqrt();
        ClusterConfig {
            centers: vec![vec![0.0, 0.0], vec![10.0, 0.0], vec![0.0, 10.0], vec![10.0, 10.0]],
            stddevs: vec![1.0; 4],
            train_per_class: 200,
            test_per_class: 100,
            shift: vec![s, s],
        }
    }
}

impl ClusterConfig {
    pub fn class_count(&self) -> usize {
        self.centers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.centers.first().map_or(0, |c| c.len())
    }

    /// Rescales the shift vector to the given Euclidean length, keeping its
    /// direction. Handy for the "small shift" misconception demo.
    pub fn with_shift_magnitude(mut self, magnitude: f64) -> ClusterConfig {
        let norm: f64 = self.shift.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut self.shift {
                *v *= magnitude / norm;
            }
        }
        self
    }

    fn validate(&self) -> Result<()> {
        if self.centers.len() < 2 {
            return Err(Error::Config(format!(
                "need at least 2 classes, got {}",
                self.centers.len()
            )));
        }
        let dim = self.input_dim();
        if dim == 0 {
            return Err(Error::Config("cluster centers must have at least one dimension".into()));
        }
        if self.centers.iter().any(|c| c.len() != dim) {
            return Err(Error::Config("cluster centers disagree on dimension".into()));
        }
        if self.stddevs.len() != self.centers.len() {
            return Err(Error::Config(format!(
                "expected {} stddevs, got {}",
                self.centers.len(),
                self.stddevs.len()
            )));
        }
        if self.stddevs.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::Config("cluster stddevs must be positive".into()));
        }
        if self.train_per_class == 0 || self.test_per_class == 0 {
            return Err(Error::Config("per-class sample counts must be at least 1".into()));
        }
        if self.shift.len() != dim {
            return Err(Error::Config(format!(
                "shift vector has dimension {}, expected {dim}",
                self.shift.len()
            )));
        }
        if self.shift.iter().all(|v| *v == 0.0) {
            return Err(Error::Config(
                "OOD shift is zero; the OOD set would equal the ID distribution".into(),
            ));
        }
        Ok(())
    }
}

fn draw_split(
    config: &ClusterConfig,
    per_class: usize,
    shift: Option<&[f64]>,
    rng: &mut RngState,
) -> (Matrix, Matrix) {
    let k = config.class_count();
    let dim = config.input_dim();
    let n = per_class * k;
    let mut inputs = Matrix::zeros(n, dim);
    let mut labels = vec![0usize; n];
    let mut row = 0;
    for class in 0..k {
        labels[class * per_class..][..per_class].fill(class);
        for _ in 0..per_class {
            for d in 0..dim {
                let mut v = rng.normal_with(config.centers[class][d], config.stddevs[class]);
                if let Some(shift) = shift {
                    v += shift[d];
                }
                inputs.set(row, d, v);
            }
            row += 1;
        }
    }
    let targets = Matrix::from_fn(n, k, |r, c| if labels[r] == c { 1.0 } else { 0.0 });
    (inputs, targets)
}

/// Generates (train, test, ood). Train and test are fresh draws from the
/// blobs with one-hot targets; the OOD set is a fresh draw from the same
/// blobs translated by the shift vector, labels discarded (all-zero
/// placeholder column).
pub fn sample_clusters(config: &ClusterConfig, rng: &mut RngState) -> Result<(LabeledSet, LabeledSet, LabeledSet)> {
    config.validate()?;
    let (train_x, train_y) = draw_split(config, config.train_per_class, None, rng);
    let (test_x, test_y) = draw_split(config, config.test_per_class, None, rng);
    let (ood_x, _) = draw_split(config, config.test_per_class, Some(&config.shift), rng);
    let ood_rows = ood_x.rows();
    Ok((
        LabeledSet { inputs: train_x, targets: train_y, tag: SetTag::Train },
        LabeledSet { inputs: test_x, targets: test_y, tag: SetTag::Test },
        LabeledSet { inputs: ood_x, targets: Matrix::zeros(ood_rows, 1), tag: SetTag::Ood },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn distance(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    #[test]
    fn per_class_counts_honored_exactly() {
        let config = ClusterConfig::default();
        let (train, test, ood) = sample_clusters(&config, &mut RngState::new(1)).unwrap();
        assert_eq!(train.inputs.rows(), 4 * 200);
        assert_eq!(test.inputs.rows(), 4 * 100);
        assert_eq!(ood.inputs.rows(), 4 * 100);
        assert_eq!(train.targets.shape(), (800, 4));
        // One-hot targets: each row sums to 1, class blocks in order.
        for r in 0..train.targets.rows() {
            let row = train.targets.row(r);
            assert_eq!(row.iter().sum::<f64>(), 1.0);
            let class = row.iter().position(|&v| v == 1.0).unwrap();
            assert_eq!(class, r / 200);
        }
    }

    #[test]
    fn zero_shift_rejected() {
        let config = ClusterConfig { shift: vec![0.0, 0.0], ..ClusterConfig::default() };
        assert!(matches!(
            sample_clusters(&config, &mut RngState::new(1)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn huge_shift_separates_perfectly_under_nearest_centroid() {
        // Score = distance to the nearest ID centroid. With a 60-sigma shift
        // every OOD point must outscore every ID point.
        let config = ClusterConfig::default().with_shift_magnitude(60.0);
        let (train, test, ood) = sample_clusters(&config, &mut RngState::new(2)).unwrap();
        let score = |inputs: &Matrix| -> Vec<f64> {
            (0..inputs.rows())
                .map(|r| {
                    config
                        .centers
                        .iter()
                        .map(|c| distance(inputs.row(r), c))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect()
        };
        let id_scores: Vec<f64> = score(&train.inputs).into_iter().chain(score(&test.inputs)).collect();
        let ood_scores = score(&ood.inputs);
        let worst_id = id_scores.iter().cloned().fold(0.0, f64::max);
        let best_ood = ood_scores.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(worst_id < best_ood, "id max {worst_id} vs ood min {best_ood}");
    }

    #[test]
    fn shift_magnitude_helper_preserves_direction() {
        let config = ClusterConfig::default().with_shift_magnitude(1.0);
        let norm: f64 = config.shift.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!((config.shift[0] - config.shift[1]).abs() < 1e-12);
    }

    #[test]
    fn generation_is_deterministic() {
        let config = ClusterConfig::default();
        let (a, _, _) = sample_clusters(&config, &mut RngState::new(5)).unwrap();
        let (b, _, _) = sample_clusters(&config, &mut RngState::new(5)).unwrap();
        assert_eq!(a.inputs.as_slice(), b.inputs.as_slice());
    }

    #[test]
    fn config_validation() {
        let mut rng = RngState::new(1);
        let one_class = ClusterConfig { centers: vec![vec![0.0, 0.0]], stddevs: vec![1.0], ..ClusterConfig::default() };
        assert!(sample_clusters(&one_class, &mut rng).is_err());
        let ragged = ClusterConfig {
            centers: vec![vec![0.0, 0.0], vec![1.0]],
            stddevs: vec![1.0, 1.0],
            ..ClusterConfig::default()
        };
        assert!(sample_clusters(&ragged, &mut rng).is_err());
        let bad_sigma = ClusterConfig { stddevs: vec![1.0, 1.0, 0.0, 1.0], ..ClusterConfig::default() };
        assert!(sample_clusters(&bad_sigma, &mut rng).is_err());
    }
}
