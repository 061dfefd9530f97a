//! A small Monte-Carlo block: all three methods on shared data, averaged over reps.

use spca::harness::{run_trials, summarize, ExperimentConfig, Lambda1Rule, MethodName, SummaryRow};
use spca::model::SpikedSpec;

pub fn run_example() -> spca::Result<Vec<SummaryRow>> {
    let spec = SpikedSpec::uniform(256, 512, 2, 10, 3.0, 20_240_601);
    let mut cfg = ExperimentConfig::new(spec, MethodName::ALL.to_vec(), 10);
    cfg.lambda1_rule = Lambda1Rule::LogPSpectralNorm;
    let records = run_trials(&cfg)?;
    Ok(summarize(&cfg, &records))
}

fn main() -> spca::Result<()> {
    let show = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
    println!("method   tpr    fpr    loss   iters  ok/failed");
    for row in run_example()? {
        println!(
            "{:<6} {:>6} {:>6} {:>6} {:>6}  {}/{}",
            row.method.as_str(),
            show(row.mean_tpr),
            show(row.mean_fpr),
            show(row.mean_loss),
            show(row.mean_iters),
            row.reps,
            row.failures
        );
    }
    Ok(())
}
