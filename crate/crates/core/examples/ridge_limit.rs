//! As λ0 grows, λ0·B_SPCA approaches the ITPS threshold update for the same `A`.

use spca::harness::Lambda1Rule;
use spca::model::SpikedSpec;
use spca::numlin::thin_svd;
use spca::solvers::{update_a, update_b_itps, update_b_spca, SolverParams};

/// Returns (λ0, max |λ0·B_SPCA − B_ITPS| / max |B_ITPS|) pairs.
pub fn run_example() -> spca::Result<Vec<(f64, f64)>> {
    let spec = SpikedSpec::uniform(60, 40, 2, 6, 3.0, 77);
    let (_, x) = spec.generate()?;
    let lambda1 = Lambda1Rule::LogPSpectralNorm.value(&x)?;
    let a = update_a(&x, &thin_svd(&x, 2)?.v(), spca::numlin::DEFAULT_RANK_TOL)?;
    let itps = update_b_itps(&x, &a, lambda1)?;

    let mut gaps = Vec::new();
    for lambda0 in [1e2, 1e4, 1e6] {
        let params = SolverParams {
            lambda0,
            lambda1,
            cd_tol: 1e-12,
            ..Default::default()
        };
        let warm = itps.scale(1.0 / lambda0);
        let b = update_b_spca(&x, &a, &params, &warm)?;
        gaps.push((lambda0, b.scale(lambda0).sub(&itps).max_abs() / itps.max_abs()));
    }
    Ok(gaps)
}

fn main() -> spca::Result<()> {
    for (lambda0, gap) in run_example()? {
        println!("lambda0 = {lambda0:>8.0e}  relative gap {gap:.3e}");
    }
    Ok(())
}
