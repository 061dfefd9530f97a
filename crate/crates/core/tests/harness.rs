mod common;

use std::collections::HashMap;

use spca::harness::{
    default_lambda1, diagnostics, kappa, run_experiment, run_trial, run_trials, summarize, ExperimentConfig,
    Lambda1Rule, MethodName, TRIALS_HEADER,
};
use spca::model::SpikedSpec;
use spca::numlin::{thin_svd, DenseMatrix};
use spca::solvers::SolverParams;

use common::*;

fn small_config(methods: Vec<MethodName>, reps: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(SpikedSpec::uniform(80, 60, 2, 6, 3.0, 99), methods, reps);
    cfg.lambda1_rule = Lambda1Rule::LogPSpectralNorm;
    cfg
}

fn bits(r: &spca::harness::TrialRecord) -> Vec<u64> {
    let m = &r.metrics;
    vec![
        m.tpr.to_bits(),
        m.fpr.to_bits(),
        m.loss.to_bits(),
        m.iters as u64,
        m.converged as u64,
        r.seed_child,
        r.rep as u64,
    ]
}

#[test]
fn lambda1_rule_values() {
    let x = DenseMatrix::identity(9);
    assert!((default_lambda1(&x).unwrap() - 9f64.ln()).abs() < 1e-14);

    let mut m = DenseMatrix::zeros(4, 8);
    m[(0, 0)] = 3.0;
    m[(1, 1)] = 1.0;
    assert!((default_lambda1(&m).unwrap() - 8f64.ln() * 9.0).abs() < 1e-12);
    assert!((Lambda1Rule::LogPSpectralNorm.value(&m).unwrap() - 8f64.ln() * 3.0).abs() < 1e-12);
    assert_eq!(Lambda1Rule::Explicit(2.5).value(&m).unwrap(), 2.5);

    let mut g = rng(50);
    let x = gaussian(50, 100, &mut g);
    let sigma = thin_svd(&x, 1).unwrap().singular_values[0];
    let want = 100f64.ln() * sigma * sigma;
    assert!((default_lambda1(&x).unwrap() - want).abs() <= 1e-9 * want);
}

#[test]
fn kappa_is_the_formula() {
    use rand::Rng;
    let mut g = rng(51);
    for _ in 0..100 {
        let r = g.random_range(1..4);
        let s = g.random_range(r..20);
        let n = g.random_range(1..2000);
        let mut betas: Vec<f64> = (0..r).map(|_| g.random_range(0.1..10.0)).collect();
        betas.sort_by(|a, b| b.total_cmp(a));
        let spec = SpikedSpec {
            n,
            p: s + 5,
            r,
            s,
            betas: betas.clone(),
            seed: 0,
        };
        let hand = ((betas[0].powi(2) + 1.0) * s as f64).sqrt() / (betas[r - 1].powi(2) * (n as f64).sqrt());
        assert_eq!(kappa(&spec), hand);
        assert_eq!(diagnostics(&spec, &SolverParams::default()).unwrap().kappa, hand);
    }
}

#[test]
fn kappa_limits_and_scaling() {
    let base = SpikedSpec::uniform(256, 512, 2, 20, 3.0, 0);
    let doubled = SpikedSpec { n: 512, ..base.clone() };
    assert!((kappa(&base) / kappa(&doubled) - 2f64.sqrt()).abs() < 1e-14);
    // κ falls like 1/β once β² dominates, so it vanishes in the strong-signal limit.
    let k = |beta: f64| kappa(&SpikedSpec::uniform(256, 512, 2, 20, beta, 0));
    assert!(k(1e3) < k(10.0) && k(1e6) < k(1e3));
    assert!((k(1e6) * 1e6 - 20f64.sqrt() / 16.0).abs() < 1e-9);
}

#[test]
fn diagnostics_reference_bounds() {
    let spec = SpikedSpec::uniform(256, 512, 2, 20, 3.0, 0);
    let d = diagnostics(
        &spec,
        &SolverParams {
            lambda1: 450.0,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(d.c0_ok);
    assert_eq!(d.lambda0_lower, 4.0 * (256.0 * 10.0 * 20.0 + 512.0));
    assert!(d.lambda0_ok);
    let lp = 512f64.ln();
    let lower = (lp * (256.0 * 10.0 + 512.0)).sqrt()
        + 256.0 * lp.powf(1.5) * ((512.0f64 * 2.0).sqrt() + 2.0 * (1.0 + 2f64.ln()) * 10f64.sqrt()) / 512.0;
    let upper = (10.0f64 * 256.0 * (10.0 * 256.0 + 512.0)).sqrt() / 40f64.sqrt();
    assert!((d.lambda1_bounds.0 - lower).abs() < 1e-9);
    assert!((d.lambda1_bounds.1 - upper).abs() < 1e-9);
    assert_eq!(d.lambda1_ok, Some(lower <= 450.0 && 450.0 <= upper));

    let tiny = SpikedSpec::uniform(3, 10, 1, 4, 3.0, 0);
    assert!(!diagnostics(&tiny, &SolverParams::default()).unwrap().c0_ok);
}

#[test]
fn trial_replay_is_bit_identical() {
    let cfg = small_config(MethodName::ALL.to_vec(), 3);
    for m in MethodName::ALL {
        let a = run_trial(&cfg, m, 2).unwrap();
        let b = run_trial(&cfg, m, 2).unwrap();
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(a.termination, b.termination);
    }
}

#[test]
fn trials_do_not_depend_on_execution_order() {
    let cfg = small_config(vec![MethodName::Itps, MethodName::Dt], 6);
    let batch = run_trials(&cfg).unwrap();
    let mut by_key: HashMap<(MethodName, usize), Vec<u64>> = HashMap::new();
    for m in [MethodName::Dt, MethodName::Itps] {
        for rep in (0..6).rev() {
            by_key.insert((m, rep), bits(&run_trial(&cfg, m, rep).unwrap()));
        }
    }
    for r in &batch {
        assert_eq!(by_key[&(r.method, r.rep)], bits(r));
    }
}

#[test]
fn methods_share_data_per_rep() {
    let cfg = small_config(vec![MethodName::Itps, MethodName::Spca, MethodName::Dt], 2);
    let seeds: Vec<u64> = MethodName::ALL
        .iter()
        .map(|&m| run_trial(&cfg, m, 1).unwrap().seed_child)
        .collect();
    assert!(seeds.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn dt_method_reports_initializer_only() {
    let cfg = small_config(vec![MethodName::Dt], 4);
    for r in run_trials(&cfg).unwrap() {
        assert_eq!(r.metrics.iters, 0);
        assert_eq!(r.termination, "initializer");
        assert_eq!(r.metrics.fpr, 0.0);
    }
}

#[test]
fn single_rep_summary_equals_trial() {
    let cfg = small_config(vec![MethodName::Itps], 1);
    let records = run_trials(&cfg).unwrap();
    let row = summarize(&cfg, &records).remove(0);
    let m = &records[0].metrics;
    assert_eq!(row.mean_tpr, Some(m.tpr));
    assert_eq!(row.mean_fpr, Some(m.fpr));
    assert_eq!(row.mean_loss, Some(m.loss));
    assert_eq!(row.mean_iters, Some(m.iters as f64));
    assert_eq!((row.reps, row.failures), (1, 0));
}

#[test]
fn failed_trials_are_counted_not_averaged() {
    let mut cfg = small_config(vec![MethodName::Itps], 3);
    cfg.lambda1_rule = Lambda1Rule::Explicit(1e12);
    let records = run_trials(&cfg).unwrap();
    assert!(records
        .iter()
        .all(|r| r.termination == "rank_collapse" && !r.metrics.converged));
    let row = summarize(&cfg, &records).remove(0);
    assert_eq!((row.reps, row.failures), (0, 3));
    assert_eq!(row.mean_loss, None);
}

#[test]
fn written_outputs_agree_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(MethodName::ALL.to_vec(), 5);
    cfg.output_path = dir.path().join("nested").join("out");
    let summary = run_experiment(&cfg).unwrap();

    let mut rdr = csv::Reader::from_path(cfg.output_path.join("trials.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        TRIALS_HEADER.to_vec()
    );
    let mut sums: HashMap<String, (f64, f64, f64, usize)> = HashMap::new();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        rows += 1;
        assert_eq!(&rec[5], "3;3");
        let e = sums.entry(rec[0].to_string()).or_default();
        e.0 += rec[7].parse::<f64>().unwrap();
        e.1 += rec[8].parse::<f64>().unwrap();
        e.2 += rec[9].parse::<f64>().unwrap();
        e.3 += 1;
    }
    assert_eq!(rows, 15);
    for row in &summary {
        let (t, f, l, c) = sums[row.method.as_str()];
        assert_eq!(c, row.reps);
        assert!((t / c as f64 - row.mean_tpr.unwrap()).abs() <= 1e-12);
        assert!((f / c as f64 - row.mean_fpr.unwrap()).abs() <= 1e-12);
        assert!((l / c as f64 - row.mean_loss.unwrap()).abs() <= 1e-12);
    }
    let json: Vec<spca::harness::SummaryRow> =
        serde_json::from_str(&std::fs::read_to_string(cfg.output_path.join("summary.json")).unwrap()).unwrap();
    assert_eq!(json, summary);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let mut cfg = small_config(vec![MethodName::Dt], 1);
    cfg.output_path = blocker.join("sub");
    assert!(matches!(run_experiment(&cfg), Err(spca::Error::Io(_))));
}

#[test]
fn config_round_trips_through_json() {
    let mut cfg = small_config(MethodName::ALL.to_vec(), 4);
    cfg.init.split_data = true;
    cfg.lambda1_rule = Lambda1Rule::Explicit(3.5);
    let text = serde_json::to_string(&cfg).unwrap();
    let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn squared_rule_accepts_contract_name() {
    let rule: Lambda1Rule = serde_json::from_str("\"PaperSpectral\"").unwrap();
    assert_eq!(rule, Lambda1Rule::LogPSpectralSq);
    assert_eq!(serde_json::to_string(&rule).unwrap(), "\"LogPSpectralSq\"");
}
