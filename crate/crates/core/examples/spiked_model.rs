//! Draw one data set from the spiked covariance model and look at it.

use spca::metrics::support_of;
use spca::model::SpikedSpec;
use spca::numlin::orthonormality_defect;

/// Returns (support size, column variance on support, column variance off support).
pub fn run_example() -> spca::Result<(usize, f64, f64)> {
    let spec = SpikedSpec::uniform(2_000, 100, 2, 10, 3.0, 42);
    let (truth, x) = spec.generate()?;
    assert!(orthonormality_defect(&truth.v) < 1e-12);

    let norms = x.column_sq_norms();
    let mean = |cols: &mut dyn Iterator<Item = usize>| {
        let v: Vec<f64> = cols.map(|j| norms[j] / spec.n as f64).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let on = mean(&mut truth.support.iter().copied());
    let off = mean(&mut (0..spec.p).filter(|j| truth.support.binary_search(j).is_err()));
    Ok((support_of(&truth.v, 0.0).len(), on, off))
}

fn main() -> spca::Result<()> {
    let (s, on, off) = run_example()?;
    println!("rows of V that are nonzero: {s}");
    println!("mean column variance on the support:  {on:.3}");
    println!("mean column variance off the support: {off:.3}");
    Ok(())
}
