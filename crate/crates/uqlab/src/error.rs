//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible matrix/layer shapes; names both shapes.
    #[error("shape mismatch in {context}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    Shape {
        context: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    /// A numeric argument outside its mathematical domain (e.g. variance <= 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// An invalid configuration value (counts, rates, ranges).
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed IDX data; `offset` is the byte position of the problem.
    #[error("idx parse error at byte {offset}: {message}")]
    IdxParse { offset: u64, message: String },

    /// Training produced a non-finite loss and was aborted.
    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    TrainingDiverged { epoch: usize, loss: f64 },

    /// The requested computation is intractable for this implementation.
    #[error("capability exceeded: {found} stochastic weights, exact integration supports at most {limit}")]
    Capability { found: usize, limit: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    ) -> Self {
        Error::Shape {
            context,
            left_rows: left.0,
            left_cols: left.1,
            right_rows: right.0,
            right_cols: right.1,
        }
    }

    /// Process exit code for the CLI: 0 success, 2 config, 3 data/domain,
    /// 4 training divergence, 1 everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Domain(_) | Error::Shape { .. } | Error::IdxParse { .. } => 3,
            Error::TrainingDiverged { .. } => 4,
            Error::Capability { .. } => 3,
            Error::Io(_) => 1,
        }
    }
}
