//! Diagonal thresholding on its own: keep the columns whose energy clears
//! `C_thr`, then take the top right singular vectors of the kept block.

use spca::init::{dt_estimate, CThrRule, InitConfig};
use spca::metrics::tpr_fpr;
use spca::model::SpikedSpec;
use spca::numlin::subspace_loss;

/// Returns (tpr, fpr, loss) for the practical and the theoretical thresholds.
pub fn run_example() -> spca::Result<Vec<(CThrRule, f64, f64, f64)>> {
    let spec = SpikedSpec::uniform(256, 512, 2, 10, 3.0, 7);
    let (truth, x) = spec.generate()?;
    let mut out = Vec::new();
    for rule in [CThrRule::Practice, CThrRule::Theory] {
        let cfg = InitConfig {
            c_thr_rule: rule,
            r: 2,
            widen_rank_deficient: true,
            ..Default::default()
        };
        match dt_estimate(&x, &cfg) {
            Ok(est) => {
                let (tpr, fpr) = tpr_fpr(&est.support, &truth.support, spec.p);
                out.push((rule, tpr, fpr, subspace_loss(&est.b0, &truth.v)?));
            }
            // The stricter threshold can keep nothing at this signal level.
            Err(_) => out.push((rule, 0.0, 0.0, f64::NAN)),
        }
    }
    Ok(out)
}

fn main() -> spca::Result<()> {
    for (rule, tpr, fpr, loss) in run_example()? {
        println!("{rule:?}: tpr {tpr:.3}  fpr {fpr:.4}  loss {loss:.3}");
    }
    Ok(())
}
