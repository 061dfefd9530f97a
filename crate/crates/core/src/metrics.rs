//! Support-recovery rates and the subspace loss.

use serde::{Deserialize, Serialize};

use crate::numlin::DenseMatrix;

pub use crate::numlin::subspace_loss;

/// Row threshold for estimators that produce exact zeros.
pub const DEFAULT_ROW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub tpr: f64,
    pub fpr: f64,
    pub loss: f64,
    pub iters: usize,
    pub wall_seconds: f64,
    pub converged: bool,
}

/// Rows of `b` with Euclidean norm above `row_tol`.
pub fn support_of(b: &DenseMatrix, row_tol: f64) -> Vec<usize> {
    b.row_norms()
        .iter()
        .enumerate()
        .filter(|(_, &nrm)| nrm > row_tol)
        .map(|(i, _)| i)
        .collect()
}

/// `(|S ∩ Ŝ| / |S|, |Ŝ \ S| / (p − |S|))` for index sets in `0..p`.
///
/// The false positive rate is normalized by the number of off-support
/// coordinates, so it stays in `[0, 1]`; it is zero when `S` covers every
/// coordinate.
pub fn tpr_fpr(estimated: &[usize], truth: &[usize], p: usize) -> (f64, f64) {
    assert!(!truth.is_empty(), "true support must be nonempty");
    let mut in_truth = vec![false; p];
    for &i in truth {
        in_truth[i] = true;
    }
    let hits = estimated.iter().filter(|&&i| in_truth[i]).count();
    let false_pos = estimated.len() - hits;
    let off = p - truth.len();
    let fpr = if off == 0 { 0.0 } else { false_pos as f64 / off as f64 };
    (hits as f64 / truth.len() as f64, fpr)
}
