//! Evaluation metrics: entropy, regression error, calibration (reliability
//! bins, ECE, Brier), histograms, ROC/AUROC, and rank correlation.
//!
//! All functions here are pure and safe to call concurrently.

pub mod calibration;
pub mod classification;
pub mod histogram;
pub mod regression;
pub mod roc;

pub use calibration::{reliability, ReliabilityBin, ReliabilityReport, DEFAULT_RELIABILITY_BINS};
pub use classification::{brier, entropy};
pub use histogram::{histogram, Histogram};
pub use regression::{mae, rmse, spearman};
pub use roc::{roc, RocCurve};
