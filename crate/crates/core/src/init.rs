//! Diagonal-thresholding initialization with optional row splitting.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{thin_svd, DenseMatrix};

/// Threshold on squared column norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CThrRule {
    /// `n + 4√(pn)`, the level under which support containment is guaranteed.
    Theory,
    /// `n + √(pn)`, the level used for the simulation tables.
    Practice,
    Explicit(f64),
}

impl CThrRule {
    pub fn value(&self, n: usize, p: usize) -> f64 {
        let (n, p) = (n as f64, p as f64);
        match *self {
            CThrRule::Theory => n + 4.0 * (p * n).sqrt(),
            CThrRule::Practice => n + (p * n).sqrt(),
            CThrRule::Explicit(v) => v,
        }
    }
}

impl FromStr for CThrRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(CThrRule::Theory),
            "practice" => Ok(CThrRule::Practice),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| *v > 0.0)
                .map(CThrRule::Explicit)
                .ok_or_else(|| {
                    Error::Parse(format!(
                        "c_thr must be theory, practice or a positive number, got {other:?}"
                    ))
                }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InitConfig {
    pub c_thr_rule: CThrRule,
    /// Initialize on one half of the rows and iterate on the other.
    pub split_data: bool,
    pub r: usize,
    /// When fewer than `r` columns pass, fall back to the `r` largest columns
    /// instead of failing.
    pub widen_rank_deficient: bool,
}

impl Default for InitConfig {
    fn default() -> Self {
        Self {
            c_thr_rule: CThrRule::Practice,
            split_data: false,
            r: 1,
            widen_rank_deficient: false,
        }
    }
}

impl InitConfig {
    pub fn validate(&self) -> Result<()> {
        if let CThrRule::Explicit(v) = self.c_thr_rule {
            if !(v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "explicit c_thr must be positive, got {v}"
                )));
            }
        }
        if self.r == 0 {
            return Err(Error::InvalidArgument("rank r must be at least 1".into()));
        }
        Ok(())
    }
}

/// Random disjoint row halves; the first gets `⌈n/2⌉` rows.
pub fn split_rows<R: Rng + ?Sized>(x: &DenseMatrix, rng: &mut R) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = x.rows();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("cannot split {n} row(s)")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let (first, second) = idx.split_at(n.div_ceil(2));
    Ok((x.select_rows(first), x.select_rows(second)))
}

/// Columns whose squared norm exceeds `c_thr`, in increasing order.
pub fn dt_support(x: &DenseMatrix, c_thr: f64) -> Result<Vec<usize>> {
    if !(c_thr > 0.0) {
        return Err(Error::InvalidArgument(format!("c_thr must be positive, got {c_thr}")));
    }
    let support: Vec<usize> = x
        .column_sq_norms()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > c_thr)
        .map(|(i, _)| i)
        .collect();
    if support.is_empty() {
        return Err(Error::EmptySupport { c_thr });
    }
    Ok(support)
}

/// Diagonal-thresholding estimate: the selected columns and the `p×r` frame
/// holding the top right singular vectors of `X` restricted to them.
#[derive(Debug, Clone)]
pub struct DtEstimate {
    pub support: Vec<usize>,
    pub b0: DenseMatrix,
}

pub fn dt_estimate(x: &DenseMatrix, cfg: &InitConfig) -> Result<DtEstimate> {
    cfg.validate()?;
    let (n, p) = x.shape();
    let c_thr = cfg.c_thr_rule.value(n, p);
    let r = cfg.r;
    if r > p.min(n) {
        return Err(Error::InvalidArgument(format!("rank {r} exceeds data shape {n}x{p}")));
    }
    let mut support = match dt_support(x, c_thr) {
        Ok(s) => s,
        Err(Error::EmptySupport { .. }) if cfg.widen_rank_deficient => Vec::new(),
        Err(e) => return Err(e),
    };
    if support.len() < r {
        if !cfg.widen_rank_deficient {
            return Err(Error::RankDeficientSupport {
                found: support.len(),
                needed: r,
            });
        }
        let norms = x.column_sq_norms();
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
        support = order[..r].to_vec();
        support.sort_unstable();
    }
    let restricted = x.select_columns(&support);
    let svd = thin_svd(&restricted, r)?;
    let mut b0 = DenseMatrix::zeros(p, r);
    for (k, &row) in support.iter().enumerate() {
        for j in 0..r {
            b0[(row, j)] = svd.vt[(j, k)];
        }
    }
    Ok(DtEstimate { support, b0 })
}

/// `B⁽⁰⁾` from diagonal thresholding.
pub fn dt_init(x: &DenseMatrix, cfg: &InitConfig) -> Result<DenseMatrix> {
    dt_estimate(x, cfg).map(|e| e.b0)
}

/// Data for the iterative stage plus its initial estimate. With
/// `split_data`, the estimate comes from one half of the rows and the
/// iterations run on the other.
#[derive(Debug, Clone)]
pub struct Initialized {
    pub estimate: DtEstimate,
    pub iterate_on: DenseMatrix,
}

pub fn initialize<R: Rng + ?Sized>(x: &DenseMatrix, cfg: &InitConfig, rng: &mut R) -> Result<Initialized> {
    if cfg.split_data {
        let (first, second) = split_rows(x, rng)?;
        Ok(Initialized {
            estimate: dt_estimate(&first, cfg)?,
            iterate_on: second,
        })
    } else {
        Ok(Initialized {
            estimate: dt_estimate(x, cfg)?,
            iterate_on: x.clone(),
        })
    }
}
