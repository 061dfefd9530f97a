use crate::error::{Error, Result};

use super::eigen::{sym_eig, sym_eigenvalues};
use super::matrix::dot;
use super::DenseMatrix;

/// Default relative spectral threshold below which a factor counts as rank deficient.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const ORTHONORMAL_TOL: f64 = 1e-8;

/// Thin SVD `m ≈ u diag(σ) vt` truncated to `k` factors.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub vt: DenseMatrix,
}

impl ThinSvd {
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (j, s) in self.singular_values.iter().enumerate() {
                us[(i, j)] *= s;
            }
        }
        us.matmul(&self.vt)
    }

    /// Right singular vectors as columns (`vt'`).
    pub fn v(&self) -> DenseMatrix {
        self.vt.transpose()
    }
}

/// Top-`k` singular triplets via the eigendecomposition of the smaller Gram matrix.
///
/// Each right singular vector is signed so its largest-magnitude entry is
/// positive; the left vector follows.
pub fn thin_svd(m: &DenseMatrix, k: usize) -> Result<ThinSvd> {
    let (rows, cols) = m.shape();
    if k == 0 || k > rows.min(cols) {
        return Err(Error::InvalidArgument(format!(
            "rank {k} outside 1..={} for a {rows}x{cols} matrix",
            rows.min(cols)
        )));
    }
    let tall = rows >= cols;
    let gram = if tall { m.gram() } else { m.outer_gram() };
    let eig = sym_eig(&gram)?;
    let sigma: Vec<f64> = eig.eigenvalues[..k].iter().map(|&l| l.max(0.0).sqrt()).collect();
    let floor = sigma[0] * f64::EPSILON * (rows.max(cols) as f64);

    // `known` holds the Gram-side vectors, `other` the vectors recovered by one product.
    let known = eig.eigenvectors.select_columns(&(0..k).collect::<Vec<_>>());
    let mut other = if tall { m.matmul(&known) } else { m.tr_matmul(&known) };
    for (j, &s) in sigma.iter().enumerate() {
        let inv = if s > floor { 1.0 / s } else { 0.0 };
        for i in 0..other.rows() {
            other[(i, j)] *= inv;
        }
    }
    orthonormalize_columns(&mut other);

    let (mut u, mut v) = if tall { (other, known) } else { (known, other) };
    for j in 0..k {
        let col = v.column(j);
        let big = col.iter().fold((0.0f64, 1.0f64), |(b, s), &x| {
            if x.abs() > b {
                (x.abs(), x.signum())
            } else {
                (b, s)
            }
        });
        if big.1 < 0.0 {
            for i in 0..v.rows() {
                v[(i, j)] = -v[(i, j)];
            }
            for i in 0..u.rows() {
                u[(i, j)] = -u[(i, j)];
            }
        }
    }
    Ok(ThinSvd {
        u,
        singular_values: sigma,
        vt: v.transpose(),
    })
}

/// Squared spectral norm `σ₁(m)²`, from the eigenvalues of the smaller Gram matrix.
pub fn spectral_norm_sq(m: &DenseMatrix) -> Result<f64> {
    let gram = if m.rows() >= m.cols() { m.gram() } else { m.outer_gram() };
    Ok(sym_eigenvalues(&gram)?[0].max(0.0))
}

/// Modified Gram-Schmidt applied twice. Columns that vanish are replaced by the
/// canonical basis vector with the largest component orthogonal to the rest.
fn orthonormalize_columns(m: &mut DenseMatrix) {
    let (rows, cols) = m.shape();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut c = m.column(j);
        let orig = dot(&c, &c).sqrt();
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(&c, b);
                c.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let mut norm = dot(&c, &c).sqrt();
        if orig == 0.0 || norm <= 1e-8 * orig {
            let mut best = (0.0, vec![0.0; rows]);
            for e in 0..rows {
                let mut cand = vec![0.0; rows];
                cand[e] = 1.0;
                for _ in 0..2 {
                    for b in &basis {
                        let proj = dot(&cand, b);
                        cand.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
                    }
                }
                let nn = dot(&cand, &cand).sqrt();
                if nn > best.0 {
                    best = (nn, cand);
                }
            }
            norm = best.0;
            c = best.1;
        }
        c.iter_mut().for_each(|x| *x /= norm);
        m.set_column(j, &c);
        basis.push(c);
    }
}

/// `P = m^{-1/2}` for symmetric positive definite `m`, so that `P m P = I`.
pub fn inv_sqrt_psd(m: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let eig = sym_eig(m)?;
    let largest = eig.eigenvalues[0];
    let smallest = *eig.eigenvalues.last().unwrap();
    if largest <= 0.0 || smallest <= rank_tol * largest {
        let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
        return Err(Error::rank_collapse(ratio));
    }
    Ok(eig.reconstruct_with(|l| 1.0 / l.sqrt()))
}

/// Thin Householder QR of a tall matrix: `m = q r`, `q` with orthonormal
/// columns, `r` upper triangular with a nonnegative diagonal.
pub fn thin_qr(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(Error::DimensionMismatch(format!(
            "thin QR needs rows >= cols, got {rows}x{cols}"
        )));
    }
    let mut a = m.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(cols);
    for k in 0..cols {
        let x: Vec<f64> = (k..rows).map(|i| a[(i, k)]).collect();
        let alpha = dot(&x, &x).sqrt();
        let mut v = x;
        if alpha > 0.0 {
            v[0] += if v[0] >= 0.0 { alpha } else { -alpha };
        }
        let vnorm = dot(&v, &v).sqrt();
        if vnorm > 0.0 {
            v.iter_mut().for_each(|t| *t /= vnorm);
            for j in k..cols {
                let mut s = 0.0;
                for (i, vi) in v.iter().enumerate() {
                    s += vi * a[(k + i, j)];
                }
                for (i, vi) in v.iter().enumerate() {
                    a[(k + i, j)] -= 2.0 * s * vi;
                }
            }
        }
        reflectors.push(v);
    }
    let mut r = DenseMatrix::zeros(cols, cols);
    for i in 0..cols {
        for j in i..cols {
            r[(i, j)] = a[(i, j)];
        }
    }
    let mut q = DenseMatrix::eye_columns(rows, cols);
    for k in (0..cols).rev() {
        let v = &reflectors[k];
        for j in 0..cols {
            let mut s = 0.0;
            for (i, vi) in v.iter().enumerate() {
                s += vi * q[(k + i, j)];
            }
            for (i, vi) in v.iter().enumerate() {
                q[(k + i, j)] -= 2.0 * s * vi;
            }
        }
    }
    for i in 0..cols {
        if r[(i, i)] < 0.0 {
            for j in i..cols {
                r[(i, j)] = -r[(i, j)];
            }
            for t in 0..rows {
                q[(t, i)] = -q[(t, i)];
            }
        }
    }
    Ok((q, r))
}

/// One-sided Jacobi SVD of a small square matrix: returns `(w, v)` where the
/// columns of `w = a v` are mutually orthogonal and `v` is orthogonal.
fn one_sided_jacobi(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    const MAX_SWEEPS: usize = 80;
    let n = a.cols();
    let mut w = a.clone();
    let mut v = DenseMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..w.rows() {
                    let (x, y) = (w[(k, i)], w[(k, j)]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut w, &mut v] {
                    for k in 0..m.rows() {
                        let (x, y) = (m[(k, i)], m[(k, j)]);
                        m[(k, i)] = c * x - s * y;
                        m[(k, j)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            return Ok((w, v));
        }
    }
    Err(Error::NonConvergence {
        what: "one-sided Jacobi SVD",
        iterations: MAX_SWEEPS,
    })
}

/// Orthogonal polar factor of a tall matrix: the `A` with `A'A = I` that
/// maximizes `tr(A' m)`, equal to `m (m'm)^{-1/2}`.
///
/// Computed as `q · polar(r)` from a Householder QR, with the small polar
/// factor taken from a one-sided Jacobi SVD so that the singular value ratio
/// check is accurate well below `sqrt(eps)`.
pub fn polar_orth(m: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let (q, r) = thin_qr(m)?;
    let (w, v) = one_sided_jacobi(&r)?;
    let n = r.cols();
    let sigma: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| w[(i, j)] * w[(i, j)]).sum::<f64>().sqrt())
        .collect();
    let largest = sigma.iter().cloned().fold(0.0, f64::max);
    let smallest = sigma.iter().cloned().fold(f64::INFINITY, f64::min);
    if largest == 0.0 || smallest <= rank_tol * largest {
        let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
        return Err(Error::rank_collapse(ratio));
    }
    let mut u = w;
    for j in 0..n {
        for i in 0..n {
            u[(i, j)] /= sigma[j];
        }
    }
    Ok(q.matmul(&u.matmul_tr(&v)))
}

/// Largest entrywise deviation of `v'v` from the identity.
pub fn orthonormality_defect(v: &DenseMatrix) -> f64 {
    v.gram().sub(&DenseMatrix::identity(v.cols())).max_abs()
}

/// Orthogonal projector `v v'` onto the column space of an orthonormal-column `v`.
pub fn projector(v: &DenseMatrix) -> Result<DenseMatrix> {
    let defect = orthonormality_defect(v);
    if defect > ORTHONORMAL_TOL {
        return Err(Error::InvalidArgument(format!(
            "projector needs orthonormal columns (defect {defect:e}); orthonormalize with polar_orth first"
        )));
    }
    Ok(v.matmul_tr(v))
}

/// `‖Π_v − Π_w‖_F` for two orthonormal-column `p×r` frames.
///
/// The projector difference is accumulated entry by entry without forming
/// either `p×p` projector; identical inputs give exactly zero.
pub fn subspace_loss(v: &DenseMatrix, w: &DenseMatrix) -> Result<f64> {
    if v.shape() != w.shape() {
        return Err(Error::DimensionMismatch(format!(
            "subspace_loss: {:?} vs {:?}",
            v.shape(),
            w.shape()
        )));
    }
    for (name, m) in [("v", v), ("v_hat", w)] {
        let defect = orthonormality_defect(m);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::InvalidArgument(format!(
                "subspace_loss: {name} is not orthonormal (defect {defect:e})"
            )));
        }
    }
    let p = v.rows();
    let mut off = 0.0;
    let mut diag = 0.0;
    for i in 0..p {
        let (vi, wi) = (v.row(i), w.row(i));
        let d = dot(vi, vi) - dot(wi, wi);
        diag += d * d;
        for j in i + 1..p {
            let d = dot(vi, v.row(j)) - dot(wi, w.row(j));
            off += d * d;
        }
    }
    Ok((diag + 2.0 * off).sqrt())
}
