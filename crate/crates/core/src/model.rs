//! Sparse spiked covariance model `X = U diag(β) V' + E`.
//!
//! `U` (n×r) and `E` (n×p) have i.i.d. standard normal entries; `V` (p×r) has
//! orthonormal columns supported on a row set `S` of size `s`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{thin_qr, DenseMatrix};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikedSpec {
    pub n: usize,
    pub p: usize,
    pub r: usize,
    pub s: usize,
    /// Spike strengths, strictly positive and nonincreasing.
    pub betas: Vec<f64>,
    pub seed: u64,
}

impl SpikedSpec {
    /// Spec with all `r` spikes equal to `beta`.
    pub fn uniform(n: usize, p: usize, r: usize, s: usize, beta: f64, seed: u64) -> Self {
        Self {
            n,
            p,
            r,
            s,
            betas: vec![beta; r],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { n, p, r, s, .. } = *self;
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if !(1 <= r && r <= s && s <= p) {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= r <= s <= p, got r={r}, s={s}, p={p}"
            )));
        }
        if self.betas.len() != r {
            return Err(Error::InvalidArgument(format!(
                "{} spike strengths given for rank {r}",
                self.betas.len()
            )));
        }
        if self.betas.iter().any(|b| !b.is_finite() || *b <= 0.0) {
            return Err(Error::InvalidArgument(
                "spike strengths must be finite and positive".into(),
            ));
        }
        if self.betas.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument("spike strengths must be nonincreasing".into()));
        }
        Ok(())
    }

    pub fn beta_max(&self) -> f64 {
        self.betas[0]
    }

    pub fn beta_min(&self) -> f64 {
        self.betas[self.r - 1]
    }

    /// Ground truth and data drawn from `self.seed`.
    pub fn generate(&self) -> Result<(GroundTruth, DenseMatrix)> {
        let mut stream = rng::lane(self.seed, rng::LANE_DATA);
        let truth = sample_ground_truth(self, &mut stream)?;
        let x = sample_data(self, &truth, &mut stream)?;
        Ok((truth, x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// p×r loadings with orthonormal columns, zero outside `support`.
    pub v: DenseMatrix,
    /// Sorted row indices of the support.
    pub support: Vec<usize>,
}

impl GroundTruth {
    /// Population covariance `V diag(β²+1) V' + (I − VV') = I + V diag(β²) V'`.
    pub fn population_covariance(&self, betas: &[f64]) -> DenseMatrix {
        let p = self.v.rows();
        let mut scaled = self.v.clone();
        for i in 0..p {
            for (j, b) in betas.iter().enumerate() {
                scaled[(i, j)] *= b * b;
            }
        }
        scaled.matmul_tr(&self.v).add(&DenseMatrix::identity(p))
    }
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Uniform random support of size `s` and a random orthonormal `V_S`
/// (QR factor of an `s×r` Gaussian matrix, nonnegative `R` diagonal).
pub fn sample_ground_truth<R: Rng + ?Sized>(spec: &SpikedSpec, rng: &mut R) -> Result<GroundTruth> {
    spec.validate()?;
    let mut support = rand::seq::index::sample(rng, spec.p, spec.s).into_vec();
    support.sort_unstable();
    let (q, _) = thin_qr(&gaussian_matrix(spec.s, spec.r, rng))?;
    let mut v = DenseMatrix::zeros(spec.p, spec.r);
    for (k, &row) in support.iter().enumerate() {
        v.row_mut(row).copy_from_slice(q.row(k));
    }
    Ok(GroundTruth { v, support })
}

/// Draws `X = U diag(β) V' + E`; `U` is drawn first, then `E`, row-major.
pub fn sample_data<R: Rng + ?Sized>(spec: &SpikedSpec, truth: &GroundTruth, rng: &mut R) -> Result<DenseMatrix> {
    spec.validate()?;
    if truth.v.shape() != (spec.p, spec.r) {
        return Err(Error::DimensionMismatch(format!(
            "ground truth is {:?}, spec wants {}x{}",
            truth.v.shape(),
            spec.p,
            spec.r
        )));
    }
    let mut u = gaussian_matrix(spec.n, spec.r, rng);
    for i in 0..spec.n {
        for (j, b) in spec.betas.iter().enumerate() {
            u[(i, j)] *= b;
        }
    }
    let mut x = gaussian_matrix(spec.n, spec.p, rng);
    // Only support columns receive signal.
    for i in 0..spec.n {
        let ui = u.row(i).to_vec();
        let row = x.row_mut(i);
        for &c in &truth.support {
            let vc = truth.v.row(c);
            row[c] += ui.iter().zip(vc).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    Ok(x)
}
