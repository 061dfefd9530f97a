//! Seeded Monte-Carlo experiments, per-trial CSV and summary JSON output,
//! and condition diagnostics for a spiked spec.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::init::{initialize, InitConfig};
use crate::metrics::{subspace_loss, support_of, tpr_fpr, TrialMetrics, DEFAULT_ROW_TOL};
use crate::model::{sample_data, sample_ground_truth, SpikedSpec};
use crate::numlin::{spectral_norm_sq, DenseMatrix};
use crate::rng;
use crate::solvers::{self, Method, SolverParams, Termination};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MethodName {
    #[serde(rename = "ITPS")]
    Itps,
    #[serde(rename = "SPCA")]
    Spca,
    /// The diagonal-thresholding initializer used as an estimator on its own.
    #[serde(rename = "DT")]
    Dt,
}

impl MethodName {
    pub const ALL: [MethodName; 3] = [MethodName::Itps, MethodName::Spca, MethodName::Dt];

    pub fn as_str(&self) -> &'static str {
        match self {
            MethodName::Itps => "ITPS",
            MethodName::Spca => "SPCA",
            MethodName::Dt => "DT",
        }
    }

    fn index(&self) -> u64 {
        match self {
            MethodName::Itps => 0,
            MethodName::Spca => 1,
            MethodName::Dt => 2,
        }
    }

    fn solver(&self) -> Option<Method> {
        match self {
            MethodName::Itps => Some(Method::Itps),
            MethodName::Spca => Some(Method::Spca),
            MethodName::Dt => None,
        }
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "itps" => Ok(MethodName::Itps),
            "spca" => Ok(MethodName::Spca),
            "dt" => Ok(MethodName::Dt),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

/// How `λ1` is chosen for each trial, evaluated on the data the solver iterates on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Lambda1Rule {
    /// `ln(p)·‖X‖²`. Also accepted as `PaperSpectral` in config files.
    #[serde(alias = "PaperSpectral")]
    LogPSpectralSq,
    Explicit(f64),
    /// `ln(p)·‖X‖`, the unsquared variant.
    LogPSpectralNorm,
}

impl Lambda1Rule {
    pub fn value(&self, x: &DenseMatrix) -> Result<f64> {
        Ok(match *self {
            Lambda1Rule::LogPSpectralSq => default_lambda1(x)?,
            Lambda1Rule::Explicit(v) => v,
            Lambda1Rule::LogPSpectralNorm => (x.cols() as f64).ln() * spectral_norm_sq(x)?.sqrt(),
        })
    }
}

/// `ln(p) · σ1(X)²`.
pub fn default_lambda1(x: &DenseMatrix) -> Result<f64> {
    Ok((x.cols() as f64).ln() * spectral_norm_sq(x)?)
}

fn default_methods() -> Vec<MethodName> {
    vec![MethodName::Itps]
}

fn default_reps() -> usize {
    100
}

fn default_lambda1_rule() -> Lambda1Rule {
    Lambda1Rule::LogPSpectralSq
}

fn default_output_path() -> PathBuf {
    PathBuf::from("out")
}

fn default_row_tol() -> f64 {
    DEFAULT_ROW_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// `seed` is the master seed of the experiment.
    pub spec: SpikedSpec,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodName>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub params: SolverParams,
    /// `r` is taken from `spec`.
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default = "default_lambda1_rule")]
    pub lambda1_rule: Lambda1Rule,
    #[serde(default = "default_output_path")]
    pub output_path: PathBuf,
    /// Rows of `B̂` above this norm count as selected.
    #[serde(default = "default_row_tol")]
    pub row_tol: f64,
    /// Record wall-clock seconds per trial. Off by default so that reruns
    /// produce byte-identical `trials.csv` files.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(spec: SpikedSpec, methods: Vec<MethodName>, reps: usize) -> Self {
        Self {
            spec,
            methods,
            reps,
            params: SolverParams::default(),
            init: InitConfig::default(),
            lambda1_rule: Lambda1Rule::LogPSpectralSq,
            output_path: default_output_path(),
            row_tol: DEFAULT_ROW_TOL,
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.params.validate()?;
        self.init_config().validate()?;
        if self.reps == 0 {
            return Err(Error::InvalidArgument("reps must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("methods must be nonempty".into()));
        }
        if let Lambda1Rule::Explicit(v) = self.lambda1_rule {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "explicit lambda1 must be finite and >= 0, got {v}"
                )));
            }
        }
        if !(self.row_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "row_tol must be >= 0, got {}",
                self.row_tol
            )));
        }
        Ok(())
    }

    fn init_config(&self) -> InitConfig {
        InitConfig {
            r: self.spec.r,
            ..self.init.clone()
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(&fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub method: MethodName,
    pub rep: usize,
    pub seed_child: u64,
    /// NaN rates and loss for failed trials.
    pub metrics: TrialMetrics,
    /// `subspace_tol`, `max_iter`, `initializer` on success; the failure kind otherwise.
    pub termination: String,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        !matches!(self.termination.as_str(), "subspace_tol" | "max_iter" | "initializer")
    }
}

fn termination_label(t: Termination) -> &'static str {
    match t {
        Termination::SubspaceTol => "subspace_tol",
        Termination::MaxIter => "max_iter",
        Termination::RankCollapse => "rank_collapse",
    }
}

fn failure_label(e: &Error) -> &'static str {
    match e {
        Error::RankCollapse { .. } => "rank_collapse",
        Error::InnerNonConvergence { .. } => "inner_nonconvergence",
        Error::EmptySupport { .. } => "empty_support",
        Error::RankDeficientSupport { .. } => "rank_deficient_support",
        Error::NonConvergence { .. } => "numerical_nonconvergence",
        _ => "error",
    }
}

/// One trial. Data come from `child_seed(master, rep)`, so every method sees
/// the same `(V, X)` for a given rep; the split uses a per-method lane.
pub fn run_trial(config: &ExperimentConfig, method: MethodName, rep: usize) -> Result<TrialRecord> {
    config.validate()?;
    Ok(trial(config, method, rep))
}

fn trial(config: &ExperimentConfig, method: MethodName, rep: usize) -> TrialRecord {
    let seed_child = rng::child_seed(config.spec.seed, rep as u64);
    let start = Instant::now();
    let outcome = trial_metrics(config, method, seed_child);
    let seconds = if config.record_timing {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };
    match outcome {
        Ok((mut metrics, termination)) => {
            metrics.wall_seconds = seconds;
            TrialRecord {
                method,
                rep,
                seed_child,
                metrics,
                termination: termination.to_string(),
            }
        }
        Err((iters, e)) => TrialRecord {
            method,
            rep,
            seed_child,
            metrics: TrialMetrics {
                tpr: f64::NAN,
                fpr: f64::NAN,
                loss: f64::NAN,
                iters,
                wall_seconds: seconds,
                converged: false,
            },
            termination: failure_label(&e).to_string(),
        },
    }
}

type TrialOutcome = std::result::Result<(TrialMetrics, &'static str), (usize, Error)>;

fn trial_metrics(config: &ExperimentConfig, method: MethodName, seed_child: u64) -> TrialOutcome {
    let spec = &config.spec;
    let mut data_rng = rng::lane(seed_child, rng::LANE_DATA);
    let truth = sample_ground_truth(spec, &mut data_rng).map_err(|e| (0, e))?;
    let x = sample_data(spec, &truth, &mut data_rng).map_err(|e| (0, e))?;

    let mut split_rng = rng::lane(seed_child, rng::LANE_SPLIT + method.index());
    let init = initialize(&x, &config.init_config(), &mut split_rng).map_err(|e| (0, e))?;

    let (b_hat_support, v_hat, iters, converged, label) = match method.solver() {
        None => (init.estimate.support.clone(), init.estimate.b0, 0, true, "initializer"),
        Some(m) => {
            let params = SolverParams {
                lambda1: config.lambda1_rule.value(&init.iterate_on).map_err(|e| (0, e))?,
                ..config.params.clone()
            };
            let res = solvers::run(m, &init.iterate_on, &init.estimate.b0, &params).map_err(|e| {
                let iters = match &e {
                    Error::RankCollapse { iterate: Some(it), .. } => it.iter,
                    _ => 0,
                };
                (iters, e)
            })?;
            (
                support_of(&res.b_hat, config.row_tol),
                res.v_hat,
                res.iters,
                res.converged,
                termination_label(res.termination),
            )
        }
    };
    let (tpr, fpr) = tpr_fpr(&b_hat_support, &truth.support, spec.p);
    let loss = subspace_loss(&truth.v, &v_hat).map_err(|e| (iters, e))?;
    Ok((
        TrialMetrics {
            tpr,
            fpr,
            loss,
            iters,
            wall_seconds: 0.0,
            converged,
        },
        label,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: MethodName,
    pub n: usize,
    pub p: usize,
    pub r: usize,
    pub s: usize,
    pub betas: Vec<f64>,
    /// Means over the `reps` successful trials; `None` when every trial failed.
    pub mean_tpr: Option<f64>,
    pub mean_fpr: Option<f64>,
    pub mean_loss: Option<f64>,
    pub mean_iters: Option<f64>,
    pub mean_seconds: Option<f64>,
    /// Successful trials entering the means.
    pub reps: usize,
    /// Trials excluded from the means.
    pub failures: usize,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// One row per method, in the order the methods are listed.
pub fn summarize(config: &ExperimentConfig, records: &[TrialRecord]) -> Vec<SummaryRow> {
    config
        .methods
        .iter()
        .map(|&method| {
            let mut ok: Vec<&TrialRecord> = records.iter().filter(|t| t.method == method && !t.failed()).collect();
            ok.sort_by_key(|t| t.rep);
            let failures = records.iter().filter(|t| t.method == method && t.failed()).count();
            let spec = &config.spec;
            SummaryRow {
                method,
                n: spec.n,
                p: spec.p,
                r: spec.r,
                s: spec.s,
                betas: spec.betas.clone(),
                mean_tpr: mean(ok.iter().map(|t| t.metrics.tpr)),
                mean_fpr: mean(ok.iter().map(|t| t.metrics.fpr)),
                mean_loss: mean(ok.iter().map(|t| t.metrics.loss)),
                mean_iters: mean(ok.iter().map(|t| t.metrics.iters as f64)),
                mean_seconds: mean(ok.iter().map(|t| t.metrics.wall_seconds)),
                reps: ok.len(),
                failures,
            }
        })
        .collect()
}

/// All `methods × reps` trials on the current rayon pool, sorted by `(method, rep)`.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();
    let tasks: Vec<(MethodName, usize)> = methods
        .iter()
        .flat_map(|&m| (0..config.reps).map(move |rep| (m, rep)))
        .collect();
    let mut records: Vec<TrialRecord> = tasks.into_par_iter().map(|(m, rep)| trial(config, m, rep)).collect();
    records.sort_by_key(|t| (t.method, t.rep));
    Ok(records)
}

/// Runs every trial, writes `trials.csv` and `summary.json` under
/// `config.output_path`, and returns the summaries.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<SummaryRow>> {
    let records = run_trials(config)?;
    let summary = summarize(config, &records);
    write_outputs(&config.output_path, config, &records, &summary)?;
    Ok(summary)
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(config: &ExperimentConfig, threads: usize) -> Result<Vec<SummaryRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}

pub const TRIALS_HEADER: [&str; 14] = [
    "method",
    "n",
    "p",
    "r",
    "s",
    "betas",
    "rep",
    "tpr",
    "fpr",
    "loss",
    "iters",
    "seconds",
    "converged",
    "termination",
];

/// Spike strengths joined with `;` so the field needs no quoting.
pub fn format_betas(betas: &[f64]) -> String {
    betas.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(";")
}

pub fn write_trials_csv(path: &Path, config: &ExperimentConfig, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRIALS_HEADER)?;
    let spec = &config.spec;
    let betas = format_betas(&spec.betas);
    for t in records {
        let m = &t.metrics;
        w.write_record([
            t.method.as_str().to_string(),
            spec.n.to_string(),
            spec.p.to_string(),
            spec.r.to_string(),
            spec.s.to_string(),
            betas.clone(),
            t.rep.to_string(),
            m.tpr.to_string(),
            m.fpr.to_string(),
            m.loss.to_string(),
            m.iters.to_string(),
            m.wall_seconds.to_string(),
            m.converged.to_string(),
            t.termination.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    records: &[TrialRecord],
    summary: &[SummaryRow],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_trials_csv(&dir.join("trials.csv"), config, records)?;
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary)? + "\n")?;
    Ok(())
}

/// Writes `m` as headerless CSV, one row per line.
pub fn write_matrix_csv(path: &Path, m: &DenseMatrix) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for i in 0..m.rows() {
        w.write_record(m.row(i).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a headerless numeric CSV into a matrix.
pub fn read_matrix_csv(path: &Path) -> Result<DenseMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "{}: row {}, column {}: {field:?}",
                        path.display(),
                        i + 1,
                        j + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

/// Difficulty and condition checks for a spec. Reference constants are 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `√((β1²+1)s) / (βr²√n)`.
    pub kappa: f64,
    /// `p ≥ 5s`, `n ≥ s`, `ln p < n`.
    pub c0_ok: bool,
    /// Left side of the diagonal-thresholding signal condition, compared to `1/√s`.
    pub c1a_lhs: f64,
    pub c1a_ok: bool,
    /// Reference lower and upper scale for `λ1`.
    pub lambda1_bounds: (f64, f64),
    /// Reference lower bound for `λ0` (SPCA only).
    pub lambda0_lower: f64,
    /// Whether the given `λ1` lies inside `lambda1_bounds`; absent when `λ1 = 0`.
    pub lambda1_ok: Option<bool>,
    pub lambda0_ok: bool,
}

pub fn kappa(spec: &SpikedSpec) -> f64 {
    let (b1, br) = (spec.beta_max(), spec.beta_min());
    ((b1 * b1 + 1.0) * spec.s as f64).sqrt() / (br * br * (spec.n as f64).sqrt())
}

pub fn diagnostics(spec: &SpikedSpec, params: &SolverParams) -> Result<Diagnostics> {
    spec.validate()?;
    let (n, p, r, s) = (spec.n as f64, spec.p as f64, spec.r as f64, spec.s as f64);
    let (b1sq, brsq) = (spec.beta_max().powi(2), spec.beta_min().powi(2));
    let br = spec.beta_min();
    let lp = p.ln();

    let c0_ok = p >= 5.0 * s && n >= s && lp < n;
    let c1a_lhs = ((s * (b1sq + 1.0)).sqrt() + s.sqrt() * br * (n * lp).powf(0.25)) / (brsq * n.sqrt());
    let c1a_ok = c1a_lhs <= 1.0 / s.sqrt();

    let lower = (lp * (n * (b1sq + 1.0) + p)).sqrt()
        + n * lp.powf(1.5) * ((p * r).sqrt() + r * (1.0 + r.ln()) * (b1sq + 1.0).sqrt()) / p;
    let upper = brsq.min(1.0) * ((brsq + 1.0) * n * ((brsq + 1.0) * n + p)).sqrt() / (s * r).sqrt();
    let lambda0_lower = 4.0 * (n * (brsq + 1.0) * s + p);
    Ok(Diagnostics {
        kappa: kappa(spec),
        c0_ok,
        c1a_lhs,
        c1a_ok,
        lambda1_bounds: (lower, upper),
        lambda0_lower,
        lambda1_ok: (params.lambda1 > 0.0).then(|| lower <= params.lambda1 && params.lambda1 <= upper),
        lambda0_ok: params.lambda0 > lambda0_lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_table_setting() {
        let spec = SpikedSpec::uniform(256, 512, 2, 20, 3.0, 0);
        let k = kappa(&spec);
        assert!((k - 200f64.sqrt() / 144.0).abs() < 1e-15);
        assert!((k - 0.0982).abs() < 1e-4);
    }

    #[test]
    fn default_lambda1_identity() {
        let x = DenseMatrix::identity(7);
        assert!((default_lambda1(&x).unwrap() - 7f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn method_parsing() {
        assert_eq!("itps".parse::<MethodName>().unwrap(), MethodName::Itps);
        assert_eq!("SPCA".parse::<MethodName>().unwrap(), MethodName::Spca);
        assert!("pca".parse::<MethodName>().is_err());
        assert_eq!(serde_json::to_string(&MethodName::Dt).unwrap(), "\"DT\"");
    }

    #[test]
    fn config_validation() {
        let spec = SpikedSpec::uniform(20, 30, 1, 3, 2.0, 1);
        let mut cfg = ExperimentConfig::new(spec, vec![MethodName::Dt], 1);
        assert!(cfg.validate().is_ok());
        cfg.reps = 0;
        assert!(cfg.validate().is_err());
        cfg.reps = 2;
        cfg.methods.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"spec":{"n":20,"p":30,"r":1,"s":3,"betas":[2.0],"seed":5}}"#).unwrap();
        assert_eq!(cfg.reps, 100);
        assert_eq!(cfg.methods, vec![MethodName::Itps]);
        assert_eq!(cfg.params.lambda0, 500_000.0);
        assert_eq!(cfg.lambda1_rule, Lambda1Rule::LogPSpectralSq);
        assert!(!cfg.record_timing);
    }
}
