use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use spca::harness::{self, ExperimentConfig};
use spca::init::{initialize, CThrRule, InitConfig};
use spca::model::SpikedSpec;
use spca::rng;
use spca::solvers::{self, Method, SolverParams};
use spca::{Error, Result};

#[derive(Parser)]
#[command(name = "spca", version, about = "Sparse principal subspace estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one data set from the spiked model; writes X.csv and truth.json.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        /// Comma-separated spike strengths, one per component.
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run SPCA or ITPS on a data matrix; writes the result as JSON.
    Solve {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Headerless CSV, one sample per row.
        #[arg(long)]
        data: PathBuf,
        /// Optional JSON file of solver parameters; flags override it.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        lambda0: Option<f64>,
        /// Defaults to the params file value, else ln(p) times the squared spectral norm of the data.
        #[arg(long)]
        lambda1: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        stop_tol: Option<f64>,
        /// `dt` or `file:PATH` (headerless p×r CSV).
        #[arg(long, default_value = "dt")]
        init: String,
        /// `theory`, `practice` or a positive number.
        #[arg(long, default_value = "practice")]
        cthr: String,
        /// Initialize on half the rows and iterate on the other half.
        #[arg(long)]
        split: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a JSON-configured Monte-Carlo experiment; writes trials.csv and summary.json.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print difficulty and condition checks for a spec as JSON.
    Diagnostics {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        #[arg(long)]
        lambda0: Option<f64>,
        #[arg(long)]
        lambda1: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Spca,
    Itps,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Print to stdout; a reader that hung up early is not an error.
fn emit(text: &str) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            n,
            p,
            r,
            s,
            betas,
            seed,
            out,
        } => {
            let spec = SpikedSpec {
                n,
                p,
                r,
                s,
                betas,
                seed,
            };
            let (truth, x) = spec.generate()?;
            fs::create_dir_all(&out)?;
            harness::write_matrix_csv(&out.join("X.csv"), &x)?;
            let sidecar = json!({ "spec": spec, "support": truth.support, "v": truth.v });
            fs::write(out.join("truth.json"), serde_json::to_string_pretty(&sidecar)? + "\n")?;
            eprintln!("wrote {}x{} data to {}", n, p, out.display());
        }
        Command::Solve {
            method,
            data,
            params,
            lambda0,
            lambda1,
            max_iter,
            stop_tol,
            init,
            cthr,
            split,
            seed,
            r,
            out,
        } => {
            let x = harness::read_matrix_csv(&data)?;
            let (mut prm, file_lambda1) = match params {
                Some(path) => {
                    let raw: serde_json::Value = serde_json::from_str(&fs::read_to_string(path)?)?;
                    let has_lambda1 = raw.get("lambda1").is_some();
                    (serde_json::from_value::<SolverParams>(raw)?, has_lambda1)
                }
                None => (SolverParams::default(), false),
            };
            if let Some(v) = lambda0 {
                prm.lambda0 = v;
            }
            if let Some(v) = max_iter {
                prm.max_iter = v;
            }
            if stop_tol.is_some() {
                prm.stop_tol = stop_tol;
            }
            let (iterate_on, b0) = if init == "dt" {
                let cfg = InitConfig {
                    c_thr_rule: cthr.parse::<CThrRule>()?,
                    split_data: split,
                    r,
                    widen_rank_deficient: false,
                };
                let mut split_rng = rng::lane(seed, rng::LANE_SPLIT);
                let done = initialize(&x, &cfg, &mut split_rng)?;
                (done.iterate_on, done.estimate.b0)
            } else if let Some(path) = init.strip_prefix("file:") {
                (x, harness::read_matrix_csv(path.as_ref())?)
            } else {
                return Err(Error::Parse(format!("--init must be dt or file:PATH, got {init:?}")));
            };
            if let Some(v) = lambda1 {
                prm.lambda1 = v;
            } else if !file_lambda1 {
                prm.lambda1 = harness::default_lambda1(&iterate_on)?;
            }
            let method = match method {
                MethodArg::Spca => Method::Spca,
                MethodArg::Itps => Method::Itps,
            };
            let result = solvers::run(method, &iterate_on, &b0, &prm)?;
            fs::write(&out, serde_json::to_string_pretty(&result)? + "\n")?;
            eprintln!(
                "{:?} after {} iterations, wrote {}",
                result.termination,
                result.iters,
                out.display()
            );
        }
        Command::Experiment { config, out, threads } => {
            let mut cfg = ExperimentConfig::from_json_file(&config)?;
            if let Some(out) = out {
                cfg.output_path = out;
            }
            let summary = match threads {
                Some(t) => harness::run_experiment_with_threads(&cfg, t)?,
                None => harness::run_experiment(&cfg)?,
            };
            emit(&serde_json::to_string_pretty(&summary)?)?;
        }
        Command::Diagnostics {
            n,
            p,
            r,
            s,
            betas,
            lambda0,
            lambda1,
        } => {
            let spec = SpikedSpec {
                n,
                p,
                r,
                s,
                betas,
                seed: 0,
            };
            let mut prm = SolverParams::default();
            if let Some(v) = lambda0 {
                prm.lambda0 = v;
            }
            if let Some(v) = lambda1 {
                prm.lambda1 = v;
            }
            let d = harness::diagnostics(&spec, &prm)?;
            emit(&serde_json::to_string_pretty(&d)?)?;
        }
    }
    Ok(())
}
