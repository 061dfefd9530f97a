//! Difficulty and condition checks for a few settings.

use spca::harness::{diagnostics, Diagnostics};
use spca::model::SpikedSpec;
use spca::solvers::SolverParams;

pub fn run_example() -> spca::Result<Vec<(SpikedSpec, Diagnostics)>> {
    let settings = [
        SpikedSpec::uniform(256, 512, 2, 20, 3.0, 0),
        SpikedSpec::uniform(1024, 2048, 2, 20, 3.0, 0),
        SpikedSpec::uniform(256, 512, 2, 4, 20.0, 0),
    ];
    let params = SolverParams {
        lambda1: 450.0,
        ..Default::default()
    };
    settings
        .into_iter()
        .map(|spec| diagnostics(&spec, &params).map(|d| (spec, d)))
        .collect()
}

fn main() -> spca::Result<()> {
    for (spec, d) in run_example()? {
        println!(
            "n={:<5} p={:<5} s={:<3} beta={:<4}  kappa {:.3}  C0 {}  C1a {} ({:.3})  lambda1 in [{:.1}, {:.1}]",
            spec.n,
            spec.p,
            spec.s,
            spec.betas[0],
            d.kappa,
            d.c0_ok,
            d.c1a_ok,
            d.c1a_lhs,
            d.lambda1_bounds.0,
            d.lambda1_bounds.1
        );
    }
    Ok(())
}
