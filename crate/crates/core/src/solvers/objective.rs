use crate::error::{Error, Result};
use crate::numlin::{polar_orth, DenseMatrix};

use super::updates::column_subgradient_residual;
use super::{Gram, SolverParams};

fn check_pair(x: &DenseMatrix, a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.shape() != b.shape() || a.rows() != x.cols() {
        return Err(Error::DimensionMismatch(format!(
            "X {:?}, A {:?}, B {:?}",
            x.shape(),
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

/// `f(A, B) = Σᵢ ‖xᵢ − A B' xᵢ‖² + λ0‖B‖²_F + λ1‖B‖₁`, evaluated from the residual `X − X B A'`.
pub fn objective_f(x: &DenseMatrix, a: &DenseMatrix, b: &DenseMatrix, params: &SolverParams) -> Result<f64> {
    check_pair(x, a, b)?;
    let residual = x.sub(&x.matmul(b).matmul_tr(a));
    Ok(residual.frobenius_norm_sq() + params.lambda0 * b.frobenius_norm_sq() + params.lambda1 * b.l1_norm())
}

/// `f̃(A, B) = −2 tr(A' X'X B) + ‖B‖²_F + λ1‖B‖₁`.
pub fn objective_f_tilde(x: &DenseMatrix, a: &DenseMatrix, b: &DenseMatrix, lambda1: f64) -> Result<f64> {
    check_pair(x, a, b)?;
    let xa = x.matmul(a);
    let xb = x.matmul(b);
    let cross: f64 = xa.as_slice().iter().zip(xb.as_slice()).map(|(u, v)| u * v).sum();
    Ok(-2.0 * cross + b.frobenius_norm_sq() + lambda1 * b.l1_norm())
}

/// Frobenius inner product.
pub(crate) fn inner(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

/// `f` from a cached `G B`, valid when `A'A = I`:
/// `tr(G) − 2⟨A, GB⟩ + ⟨B, GB⟩ + λ0‖B‖² + λ1‖B‖₁`.
pub(crate) fn objective_f_cached(
    trace_g: f64,
    a: &DenseMatrix,
    b: &DenseMatrix,
    gb: &DenseMatrix,
    params: &SolverParams,
) -> f64 {
    trace_g - 2.0 * inner(a, gb) + inner(b, gb) + params.lambda0 * b.frobenius_norm_sq() + params.lambda1 * b.l1_norm()
}

pub(crate) fn objective_f_tilde_cached(a: &DenseMatrix, b: &DenseMatrix, gb: &DenseMatrix, lambda1: f64) -> f64 {
    -2.0 * inner(a, gb) + b.frobenius_norm_sq() + lambda1 * b.l1_norm()
}

/// Largest entrywise distance from zero to the subdifferential of `f(A, ·)` at `B`.
pub fn b_subgradient_residual(gram: &Gram, a: &DenseMatrix, b: &DenseMatrix, lambda0: f64, lambda1: f64) -> f64 {
    let ga = gram.apply(a);
    let gb = gram.apply(b);
    (0..b.cols())
        .map(|j| column_subgradient_residual(&gb.column(j), &ga.column(j), &b.column(j), lambda0, lambda1))
        .fold(0.0, f64::max)
}

/// `‖A − polar(X'X B)‖_F`; infinite when `X'X B` has lost rank.
pub fn a_stationarity_defect(gram: &Gram, a: &DenseMatrix, b: &DenseMatrix, rank_tol: f64) -> f64 {
    match polar_orth(&gram.apply(b), rank_tol) {
        Ok(best) => best.sub(a).frobenius_norm(),
        Err(_) => f64::INFINITY,
    }
}

/// Stationarity residual of the SPCA problem: the `B`-subgradient residual
/// plus the `A`-stationarity defect.
pub fn kkt_residual_spca(x: &DenseMatrix, a: &DenseMatrix, b: &DenseMatrix, params: &SolverParams) -> Result<f64> {
    check_pair(x, a, b)?;
    let gram = Gram::of(x);
    Ok(kkt_residual_spca_gram(&gram, a, b, params))
}

pub fn kkt_residual_spca_gram(gram: &Gram, a: &DenseMatrix, b: &DenseMatrix, params: &SolverParams) -> f64 {
    b_subgradient_residual(gram, a, b, params.lambda0, params.lambda1)
        + a_stationarity_defect(gram, a, b, params.rank_tol)
}

/// Stationarity residual of the `f̃` problem. The `B`-part is the distance
/// from zero to `−2[X'X A]_ij + 2B_ij + λ1 ∂|B_ij|`.
pub fn kkt_residual_itps(x: &DenseMatrix, a: &DenseMatrix, b: &DenseMatrix, params: &SolverParams) -> Result<f64> {
    check_pair(x, a, b)?;
    let gram = Gram::of(x);
    let ga = gram.apply(a);
    let mut worst: f64 = 0.0;
    for (c, bij) in ga.as_slice().iter().zip(b.as_slice()) {
        let grad = -2.0 * c + 2.0 * bij;
        let r = if *bij != 0.0 {
            (grad + params.lambda1 * bij.signum()).abs()
        } else {
            (grad.abs() - params.lambda1).max(0.0)
        };
        worst = worst.max(r);
    }
    Ok(worst + a_stationarity_defect(&gram, a, b, params.rank_tol))
}
