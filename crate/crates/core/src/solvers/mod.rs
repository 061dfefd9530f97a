//! SPCA alternating minimization and its iterative-thresholding limit (ITPS).
//!
//! Both alternate
//!
//! ```text
//! A ← polar(X'X B)
//! B ← argmin_B  ‖X(B − A)‖² + λ0‖B‖² + λ1‖B‖₁      (SPCA, coordinate descent)
//! B ← S(X'X A, λ1/2)                               (ITPS, entrywise)
//! ```
//!
//! and stop once the projectors of consecutive `B` iterates are within
//! `stop_tol` in Frobenius norm.

mod objective;
mod updates;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{polar_orth, subspace_loss, DenseMatrix, DEFAULT_RANK_TOL};

pub use objective::{
    a_stationarity_defect, b_subgradient_residual, kkt_residual_itps, kkt_residual_spca, kkt_residual_spca_gram,
    objective_f, objective_f_tilde,
};
pub use updates::{
    soft_threshold, update_a, update_a_gram, update_b_itps, update_b_itps_gram, update_b_spca, update_b_spca_gram,
};

use objective::{objective_f_cached, objective_f_tilde_cached};

/// Cached `X'X`.
#[derive(Debug, Clone)]
pub struct Gram {
    g: DenseMatrix,
    trace: f64,
}

impl Gram {
    pub fn of(x: &DenseMatrix) -> Self {
        let g = x.gram();
        let trace = g.trace();
        Self { g, trace }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    /// `X'X m`.
    pub fn apply(&self, m: &DenseMatrix) -> DenseMatrix {
        self.g.matmul(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Ridge weight; ignored by ITPS.
    pub lambda0: f64,
    pub lambda1: f64,
    pub max_iter: usize,
    /// Subspace-change threshold; `None` means `1/(n·p)` of the data being solved.
    pub stop_tol: Option<f64>,
    /// Subgradient residual target of the coordinate-descent `B`-update.
    pub cd_tol: f64,
    pub cd_max_sweeps: usize,
    pub rank_tol: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            lambda0: 500_000.0,
            lambda1: 0.0,
            max_iter: 200,
            stop_tol: None,
            cd_tol: 1e-8,
            cd_max_sweeps: 1000,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.lambda0 >= 0.0 && self.lambda0.is_finite()) {
            return bad(format!("lambda0 must be finite and >= 0, got {}", self.lambda0));
        }
        if !(self.lambda1 >= 0.0 && self.lambda1.is_finite()) {
            return bad(format!("lambda1 must be finite and >= 0, got {}", self.lambda1));
        }
        if self.max_iter == 0 || self.cd_max_sweeps == 0 {
            return bad("max_iter and cd_max_sweeps must be at least 1".into());
        }
        for (name, v) in [
            ("stop_tol", self.stop_tol.unwrap_or(1.0)),
            ("cd_tol", self.cd_tol),
            ("rank_tol", self.rank_tol),
        ] {
            if !(v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }

    /// The stopping threshold for an `n×p` data matrix.
    pub fn resolved_stop_tol(&self, n: usize, p: usize) -> f64 {
        self.stop_tol.unwrap_or(1.0 / (n as f64 * p as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Spca,
    Itps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    SubspaceTol,
    MaxIter,
    RankCollapse,
}

#[derive(Debug, Clone)]
pub struct SolveState {
    /// Orthonormal `A` of the last update; `None` before the first step.
    pub a: Option<DenseMatrix>,
    pub b: DenseMatrix,
    pub iter: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub b_hat: DenseMatrix,
    pub a_hat: DenseMatrix,
    /// Orthonormal frame spanning the columns of `b_hat`.
    pub v_hat: DenseMatrix,
    pub objective_trace: Vec<f64>,
    pub iters: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Projector distance between the last two `B` iterates.
    pub final_change: f64,
}

/// Objective values around one outer iteration `k → k+1`.
#[derive(Debug, Clone, Copy)]
pub struct StepReport {
    /// Objective at `(A^k, B^k)`; absent on the first step.
    pub before: Option<f64>,
    /// Objective at `(A^{k+1}, B^k)`.
    pub after_a: f64,
    /// Objective at `(A^{k+1}, B^{k+1})`.
    pub after_b: f64,
    pub subspace_change: f64,
}

/// Alternating solver for either method, stepping one outer iteration at a time.
///
/// The objective is `f` for SPCA and `f̃` for ITPS.
pub struct AlternatingSolver {
    method: Method,
    params: SolverParams,
    stop_tol: f64,
    gram: Gram,
    a: Option<DenseMatrix>,
    b: DenseMatrix,
    gb: DenseMatrix,
    frame: DenseMatrix,
    iter: usize,
    trace: Vec<f64>,
    last_change: f64,
}

impl AlternatingSolver {
    pub fn new(x: &DenseMatrix, b0: &DenseMatrix, params: &SolverParams, method: Method) -> Result<Self> {
        Self::with_gram(Gram::of(x), x.rows(), b0, params, method)
    }

    /// `n` is only used to resolve the default stopping threshold.
    pub fn with_gram(gram: Gram, n: usize, b0: &DenseMatrix, params: &SolverParams, method: Method) -> Result<Self> {
        params.validate()?;
        updates::check_frame(&gram, b0, "B0")?;
        let frame = polar_orth(b0, params.rank_tol).map_err(|e| e.with_iterate(0, b0))?;
        let gb = gram.apply(b0);
        Ok(Self {
            method,
            stop_tol: params.resolved_stop_tol(n, gram.dim()),
            params: params.clone(),
            gram,
            a: None,
            b: b0.clone(),
            gb,
            frame,
            iter: 0,
            trace: Vec::new(),
            last_change: f64::INFINITY,
        })
    }

    pub fn stop_tol(&self) -> f64 {
        self.stop_tol
    }

    pub fn gram(&self) -> &Gram {
        &self.gram
    }

    pub fn state(&self) -> SolveState {
        SolveState {
            a: self.a.clone(),
            b: self.b.clone(),
            iter: self.iter,
        }
    }

    fn objective(&self, a: &DenseMatrix, b: &DenseMatrix, gb: &DenseMatrix) -> f64 {
        match self.method {
            Method::Spca => objective_f_cached(self.gram.trace(), a, b, gb, &self.params),
            Method::Itps => objective_f_tilde_cached(a, b, gb, self.params.lambda1),
        }
    }

    pub fn step(&mut self) -> Result<StepReport> {
        let k = self.iter;
        let a = polar_orth(&self.gb, self.params.rank_tol).map_err(|e| e.with_iterate(k, &self.b))?;
        let before = self.a.as_ref().map(|prev| self.objective(prev, &self.b, &self.gb));
        let after_a = self.objective(&a, &self.b, &self.gb);

        let b = match self.method {
            Method::Spca => update_b_spca_gram(&self.gram, &a, &self.params, &self.b)?,
            Method::Itps => update_b_itps_gram(&self.gram, &a, self.params.lambda1)?,
        };
        for j in 0..b.cols() {
            if (0..b.rows()).all(|i| b[(i, j)] == 0.0) {
                return Err(Error::rank_collapse(0.0).with_iterate(k + 1, &b));
            }
        }
        let frame = polar_orth(&b, self.params.rank_tol).map_err(|e| e.with_iterate(k + 1, &b))?;
        let gb = self.gram.apply(&b);
        let after_b = self.objective(&a, &b, &gb);
        let change = subspace_loss(&self.frame, &frame)?;

        self.a = Some(a);
        self.b = b;
        self.gb = gb;
        self.frame = frame;
        self.iter += 1;
        self.trace.push(after_b);
        self.last_change = change;
        Ok(StepReport {
            before,
            after_a,
            after_b,
            subspace_change: change,
        })
    }

    pub fn run(mut self) -> Result<SolveResult> {
        let termination = loop {
            let report = self.step()?;
            if report.subspace_change <= self.stop_tol {
                break Termination::SubspaceTol;
            }
            if self.iter >= self.params.max_iter {
                break Termination::MaxIter;
            }
        };
        Ok(SolveResult {
            a_hat: self.a.expect("at least one step was taken"),
            b_hat: self.b,
            v_hat: self.frame,
            objective_trace: self.trace,
            iters: self.iter,
            converged: termination == Termination::SubspaceTol,
            termination,
            final_change: self.last_change,
        })
    }
}

/// SPCA alternating minimization from `b0`.
pub fn run_spca(x: &DenseMatrix, b0: &DenseMatrix, params: &SolverParams) -> Result<SolveResult> {
    AlternatingSolver::new(x, b0, params, Method::Spca)?.run()
}

/// ITPS iteration from `b0`.
pub fn run_itps(x: &DenseMatrix, b0: &DenseMatrix, params: &SolverParams) -> Result<SolveResult> {
    AlternatingSolver::new(x, b0, params, Method::Itps)?.run()
}

pub fn run(method: Method, x: &DenseMatrix, b0: &DenseMatrix, params: &SolverParams) -> Result<SolveResult> {
    AlternatingSolver::new(x, b0, params, method)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_validation() {
        assert!(SolverParams::default().validate().is_ok());
        for bad in [
            SolverParams {
                lambda0: -1.0,
                ..Default::default()
            },
            SolverParams {
                lambda1: f64::NAN,
                ..Default::default()
            },
            SolverParams {
                max_iter: 0,
                ..Default::default()
            },
            SolverParams {
                stop_tol: Some(0.0),
                ..Default::default()
            },
            SolverParams {
                cd_tol: 0.0,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
        assert_eq!(SolverParams::default().resolved_stop_tol(10, 20), 1.0 / 200.0);
    }

    #[test]
    fn zero_start_is_rank_collapse() {
        let x = DenseMatrix::identity(3);
        let err = run_itps(&x, &DenseMatrix::zeros(3, 1), &SolverParams::default()).unwrap_err();
        match err {
            Error::RankCollapse { iterate: Some(it), .. } => assert_eq!(it.iter, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn full_shrinkage_collapses_with_iterate() {
        let x = DenseMatrix::from_rows(&[[1.0, 0.0, 0.2], [0.0, 2.0, 0.1], [0.3, 0.1, 1.0]]).unwrap();
        let params = SolverParams {
            lambda1: 1e6,
            ..Default::default()
        };
        for method in [Method::Spca, Method::Itps] {
            let err = run(method, &x, &DenseMatrix::eye_columns(3, 2), &params).unwrap_err();
            match err {
                Error::RankCollapse { iterate: Some(it), .. } => {
                    assert_eq!(it.iter, 1);
                    assert_eq!(it.b.max_abs(), 0.0);
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }
}
