//! Instance builders and independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use spca::init::{dt_init, CThrRule, InitConfig};
use spca::model::{GroundTruth, SpikedSpec};
use spca::DenseMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Orthonormal frame by classical Gram-Schmidt on a Gaussian matrix.
pub fn random_frame(p: usize, r: usize, rng: &mut impl Rng) -> DenseMatrix {
    let g = gaussian(p, r, rng);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for j in 0..r {
        let mut v = g.column(j);
        for q in &cols {
            let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= d * qi;
            }
        }
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= nrm);
        cols.push(v);
    }
    DenseMatrix::from_fn(p, r, |i, j| cols[j][i])
}

/// Spiked instance together with a diagonal-thresholding start.
pub struct Instance {
    pub truth: GroundTruth,
    pub x: DenseMatrix,
    pub b0: DenseMatrix,
}

pub fn spiked_instance(spec: &SpikedSpec) -> Instance {
    let (truth, x) = spec.generate().expect("valid spec");
    let cfg = InitConfig {
        c_thr_rule: CThrRule::Practice,
        r: spec.r,
        widen_rank_deficient: true,
        ..Default::default()
    };
    let b0 = dt_init(&x, &cfg).expect("initializer");
    Instance { truth, x, b0 }
}

/// `ln(p)·‖X‖`, computed by power iteration on `X'X`.
pub fn calibrated_lambda1(x: &DenseMatrix) -> f64 {
    (x.cols() as f64).ln() * power_top_eigenvalue(&x.gram()).sqrt()
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
pub fn power_top_eigenvalue(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.37).sin()).collect();
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w: Vec<f64> = (0..n).map(|i| (0..n).map(|k| m[(i, k)] * v[k]).sum()).collect();
        let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return 0.0;
        }
        let next = w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        v = w.into_iter().map(|x| x / nrm).collect();
        if (next - lambda).abs() <= 1e-15 * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, sorted descending.
pub fn jacobi_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = m.to_rows();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Proximal gradient on `b'(G + λ0 I)b − 2c'b + λ1‖b‖₁`, step `1/L`.
pub fn prox_grad_column(g: &DenseMatrix, c: &[f64], lambda0: f64, lambda1: f64, iters: usize) -> Vec<f64> {
    let p = c.len();
    let lip = 2.0 * (power_top_eigenvalue(g) + lambda0) * (1.0 + 1e-9);
    let step = 1.0 / lip;
    let mut b = vec![0.0; p];
    for _ in 0..iters {
        let grad: Vec<f64> = (0..p)
            .map(|i| 2.0 * ((0..p).map(|k| g[(i, k)] * b[k]).sum::<f64>() + lambda0 * b[i] - c[i]))
            .collect();
        for i in 0..p {
            let z = b[i] - step * grad[i];
            let t = lambda1 * step;
            b[i] = z.signum() * (z.abs() - t).max(0.0);
        }
    }
    b
}

/// `Σᵢ ‖xᵢ − A B' xᵢ‖² + λ0‖B‖² + λ1‖B‖₁` by explicit loops over samples.
pub fn naive_f(x: &DenseMatrix, a: &DenseMatrix, b: &DenseMatrix, lambda0: f64, lambda1: f64) -> f64 {
    let (n, p) = x.shape();
    let r = a.cols();
    let mut total = 0.0;
    for i in 0..n {
        let xi = x.row(i);
        let proj: Vec<f64> = (0..r).map(|j| (0..p).map(|k| b[(k, j)] * xi[k]).sum()).collect();
        for k in 0..p {
            let recon: f64 = (0..r).map(|j| a[(k, j)] * proj[j]).sum();
            total += (xi[k] - recon).powi(2);
        }
    }
    let mut ridge = 0.0;
    let mut lasso = 0.0;
    for k in 0..p {
        for j in 0..r {
            ridge += b[(k, j)] * b[(k, j)];
            lasso += b[(k, j)].abs();
        }
    }
    total + lambda0 * ridge + lambda1 * lasso
}

/// `−2 Σᵢ (A'xᵢ)·(B'xᵢ) + ‖B‖² + λ1‖B‖₁` by explicit loops.
pub fn naive_f_tilde(x: &DenseMatrix, a: &DenseMatrix, b: &DenseMatrix, lambda1: f64) -> f64 {
    let (n, p) = x.shape();
    let r = a.cols();
    let mut cross = 0.0;
    for i in 0..n {
        let xi = x.row(i);
        for j in 0..r {
            let pa: f64 = (0..p).map(|k| a[(k, j)] * xi[k]).sum();
            let pb: f64 = (0..p).map(|k| b[(k, j)] * xi[k]).sum();
            cross += pa * pb;
        }
    }
    let mut rest = 0.0;
    for k in 0..p {
        for j in 0..r {
            rest += b[(k, j)] * b[(k, j)] + lambda1 * b[(k, j)].abs();
        }
    }
    -2.0 * cross + rest
}

/// Projector distance computed the long way, through explicit `p×p` matrices.
pub fn naive_projector_distance(v: &DenseMatrix, w: &DenseMatrix) -> f64 {
    let pv = v.matmul_tr(v);
    let pw = w.matmul_tr(w);
    pv.sub(&pw).frobenius_norm()
}
