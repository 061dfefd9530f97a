//! Iterative thresholding (ITPS) started from diagonal thresholding.

use spca::harness::Lambda1Rule;
use spca::init::{dt_estimate, InitConfig};
use spca::metrics::{support_of, tpr_fpr, DEFAULT_ROW_TOL};
use spca::model::SpikedSpec;
use spca::numlin::subspace_loss;
use spca::solvers::{run_itps, SolverParams};

/// Returns (loss of the start, loss of ITPS, tpr, fpr, iterations).
pub fn run_example() -> spca::Result<(f64, f64, f64, f64, usize)> {
    let spec = SpikedSpec::uniform(256, 512, 2, 20, 3.0, 2024);
    let (truth, x) = spec.generate()?;
    let start = dt_estimate(
        &x,
        &InitConfig {
            r: 2,
            widen_rank_deficient: true,
            ..Default::default()
        },
    )?;

    // ln(p)·‖X‖: the squared norm would threshold every entry away.
    let params = SolverParams {
        lambda1: Lambda1Rule::LogPSpectralNorm.value(&x)?,
        ..Default::default()
    };
    let res = run_itps(&x, &start.b0, &params)?;
    let (tpr, fpr) = tpr_fpr(&support_of(&res.b_hat, DEFAULT_ROW_TOL), &truth.support, spec.p);
    Ok((
        subspace_loss(&start.b0, &truth.v)?,
        subspace_loss(&res.v_hat, &truth.v)?,
        tpr,
        fpr,
        res.iters,
    ))
}

fn main() -> spca::Result<()> {
    let (l0, l, tpr, fpr, iters) = run_example()?;
    println!("start loss {l0:.3} -> ITPS loss {l:.3} after {iters} iterations");
    println!("tpr {tpr:.3}  fpr {fpr:.4}");
    Ok(())
}
