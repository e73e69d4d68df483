//! Seeded dataset generators and file ingestion.

pub mod clusters;
pub mod idx;
pub mod toy;

use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetTag {
    Train,
    Test,
    Id,
    Ood,
}

/// A dataset slice: inputs and targets with matching row counts.
#[derive(Debug, Clone)]
pub struct LabeledSet {
    pub inputs: Matrix,
    pub targets: Matrix,
    pub tag: SetTag,
}

pub use clusters::{sample_clusters, ClusterConfig};
pub use idx::{load_idx, parse_idx_images, parse_idx_labels};
pub use toy::{noise_sigma, ood_regression_split, sample_toy, ToyRegressionConfig};
