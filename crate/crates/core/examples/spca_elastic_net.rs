//! The elastic-net SPCA solver, with its objective trace and stationarity check.

use spca::harness::Lambda1Rule;
use spca::init::{dt_estimate, InitConfig};
use spca::model::SpikedSpec;
use spca::numlin::{spectral_norm_sq, subspace_loss};
use spca::solvers::{kkt_residual_spca, run_spca, SolverParams};

/// Returns (objective trace, relative KKT residual, loss).
pub fn run_example() -> spca::Result<(Vec<f64>, f64, f64)> {
    let spec = SpikedSpec::uniform(200, 150, 2, 10, 3.0, 9);
    let (truth, x) = spec.generate()?;
    let b0 = dt_estimate(
        &x,
        &InitConfig {
            r: 2,
            widen_rank_deficient: true,
            ..Default::default()
        },
    )?
    .b0;
    let params = SolverParams {
        lambda0: 10.0,
        lambda1: Lambda1Rule::LogPSpectralNorm.value(&x)?,
        ..Default::default()
    };
    let res = run_spca(&x, &b0, &params)?;
    let kkt = kkt_residual_spca(&x, &res.a_hat, &res.b_hat, &params)? / spectral_norm_sq(&x)?;
    Ok((res.objective_trace, kkt, subspace_loss(&res.v_hat, &truth.v)?))
}

fn main() -> spca::Result<()> {
    let (trace, kkt, loss) = run_example()?;
    for (k, f) in trace.iter().enumerate() {
        println!("iter {:>3}  f = {f:.6e}", k + 1);
    }
    println!("KKT residual / ||X||^2 = {kkt:.2e}, loss {loss:.3}");
    Ok(())
}
