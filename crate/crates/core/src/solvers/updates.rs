use crate::error::{Error, Result};
use crate::numlin::{polar_orth, DenseMatrix};

use super::{Gram, SolverParams};

/// `S(x, a) = sign(x) · max(|x| − a, 0)`.
#[inline]
pub fn soft_threshold(x: f64, a: f64) -> f64 {
    debug_assert!(a >= 0.0, "negative threshold {a}");
    if x > a {
        x - a
    } else if x < -a {
        x + a
    } else {
        0.0
    }
}

pub(crate) fn check_frame(gram: &Gram, m: &DenseMatrix, what: &str) -> Result<()> {
    let p = gram.dim();
    if m.rows() != p || m.cols() > p {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {:?}, expected {p} rows and at most {p} columns",
            m.shape()
        )));
    }
    Ok(())
}

/// `A = polar(X'X B)`: the orthonormal maximizer of `tr(A' X'X B)`.
pub fn update_a(x: &DenseMatrix, b: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    update_a_gram(&Gram::of(x), b, rank_tol)
}

pub fn update_a_gram(gram: &Gram, b: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    check_frame(gram, b, "B")?;
    polar_orth(&gram.apply(b), rank_tol)
}

/// Entrywise `S([X'X A]_ij, λ1/2)`.
pub fn update_b_itps(x: &DenseMatrix, a: &DenseMatrix, lambda1: f64) -> Result<DenseMatrix> {
    update_b_itps_gram(&Gram::of(x), a, lambda1)
}

pub fn update_b_itps_gram(gram: &Gram, a: &DenseMatrix, lambda1: f64) -> Result<DenseMatrix> {
    check_frame(gram, a, "A")?;
    if !(lambda1 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda1 must be nonnegative, got {lambda1}"
        )));
    }
    let half = 0.5 * lambda1;
    Ok(gram.apply(a).map(|v| soft_threshold(v, half)))
}

/// Elastic-net `B`-update: column `j` minimizes
/// `‖X b − X a_j‖² + λ0‖b‖² + λ1‖b‖₁` by cyclic coordinate descent from `warm`.
pub fn update_b_spca(
    x: &DenseMatrix,
    a: &DenseMatrix,
    params: &SolverParams,
    warm: &DenseMatrix,
) -> Result<DenseMatrix> {
    update_b_spca_gram(&Gram::of(x), a, params, warm)
}

pub fn update_b_spca_gram(
    gram: &Gram,
    a: &DenseMatrix,
    params: &SolverParams,
    warm: &DenseMatrix,
) -> Result<DenseMatrix> {
    check_frame(gram, a, "A")?;
    if warm.shape() != a.shape() {
        return Err(Error::DimensionMismatch(format!(
            "warm start {:?} does not match A {:?}",
            warm.shape(),
            a.shape()
        )));
    }
    let target = gram.apply(a);
    let mut out = warm.clone();
    for j in 0..a.cols() {
        let c = target.column(j);
        let mut b = warm.column(j);
        elastic_net_column(gram.matrix(), &c, &mut b, params).map_err(|(sweeps, residual)| {
            Error::InnerNonConvergence {
                column: j,
                sweeps,
                residual,
            }
        })?;
        out.set_column(j, &b);
    }
    Ok(out)
}

/// Largest distance from zero to the subgradient of the column objective
/// `b'Gb − 2c'b + λ0‖b‖² + λ1‖b‖₁` at `b`, given `gb = G b`.
pub(crate) fn column_subgradient_residual(gb: &[f64], c: &[f64], b: &[f64], lambda0: f64, lambda1: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..b.len() {
        let grad = 2.0 * (gb[i] - c[i]) + 2.0 * lambda0 * b[i];
        let r = if b[i] != 0.0 {
            (grad + lambda1 * b[i].signum()).abs()
        } else {
            (grad.abs() - lambda1).max(0.0)
        };
        worst = worst.max(r);
    }
    worst
}

fn gram_times(g: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    (0..g.rows())
        .map(|i| g.row(i).iter().zip(b).map(|(x, y)| x * y).sum())
        .collect()
}

/// Cyclic coordinate descent on one column. `G` is symmetric, so row `i`
/// doubles as column `i` when the cached `G b` is updated.
///
/// Stops once the subgradient residual is at most `cd_tol`, or at the
/// floating-point floor of the gradient terms when `cd_tol` lies below it.
/// On failure returns `(sweeps, residual)`.
fn elastic_net_column(
    g: &DenseMatrix,
    c: &[f64],
    b: &mut [f64],
    params: &SolverParams,
) -> std::result::Result<(), (usize, f64)> {
    let p = b.len();
    let (l0, l1) = (params.lambda0, params.lambda1);
    let half = 0.5 * l1;
    let c_max = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut gb = gram_times(g, b);
    let mut residual = column_subgradient_residual(&gb, c, b, l0, l1);
    let floor = |b: &[f64]| {
        let b_max = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let g_max = (0..p).fold(0.0f64, |m, i| m.max(g[(i, i)].abs()));
        64.0 * f64::EPSILON * (p as f64).sqrt() * (2.0 * c_max + l1 + 2.0 * (g_max + l0) * b_max)
    };
    if residual <= params.cd_tol.max(floor(b)) {
        return Ok(());
    }
    for sweep in 1..=params.cd_max_sweeps {
        for i in 0..p {
            let gii = g[(i, i)];
            let denom = gii + l0;
            let old = b[i];
            let new = if denom > 0.0 {
                soft_threshold(c[i] - (gb[i] - gii * old), half) / denom
            } else {
                0.0
            };
            if new != old {
                let delta = new - old;
                b[i] = new;
                for (gk, gik) in gb.iter_mut().zip(g.row(i)) {
                    *gk += delta * gik;
                }
            }
        }
        // Refresh the cached product so the check is not polluted by drift.
        gb = gram_times(g, b);
        residual = column_subgradient_residual(&gb, c, b, l0, l1);
        if residual <= params.cd_tol.max(floor(b)) {
            return Ok(());
        }
        if sweep == params.cd_max_sweeps {
            break;
        }
    }
    Err((params.cd_max_sweeps, residual))
}
