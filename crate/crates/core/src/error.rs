use thiserror::Error;

use crate::numlin::DenseMatrix;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    /// The smallest singular value fell below `rank_tol` times the largest.
    /// Solvers attach the offending iterate.
    #[error("rank collapse (smallest/largest singular value ratio {ratio:e})")]
    RankCollapse {
        ratio: f64,
        iterate: Option<Box<CollapsedIterate>>,
    },

    #[error(
        "coordinate descent for column {column} stopped after {sweeps} sweeps with subgradient residual {residual:e}"
    )]
    InnerNonConvergence {
        column: usize,
        sweeps: usize,
        residual: f64,
    },

    #[error("no column passed the diagonal threshold {c_thr}")]
    EmptySupport { c_thr: f64 },

    #[error("diagonal thresholding kept {found} columns but rank {needed} was requested")]
    RankDeficientSupport { found: usize, needed: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

/// Solver state at the moment the A-update lost rank.
#[derive(Debug, Clone)]
pub struct CollapsedIterate {
    pub iter: usize,
    pub b: DenseMatrix,
}

impl Error {
    pub(crate) fn rank_collapse(ratio: f64) -> Self {
        Error::RankCollapse { ratio, iterate: None }
    }

    pub fn is_rank_collapse(&self) -> bool {
        matches!(self, Error::RankCollapse { .. })
    }

    /// Attach the current iterate to a rank-collapse error; other errors pass through.
    pub(crate) fn with_iterate(self, iter: usize, b: &DenseMatrix) -> Self {
        match self {
            Error::RankCollapse { ratio, .. } => Error::RankCollapse {
                ratio,
                iterate: Some(Box::new(CollapsedIterate { iter, b: b.clone() })),
            },
            other => other,
        }
    }
}
