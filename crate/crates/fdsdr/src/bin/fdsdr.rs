//! Command-line front end: `simulate` writes synthetic datasets, `bench`
//! runs seeded Monte-Carlo repetitions, `fit` estimates a subspace for CSV
//! data. Exit codes: 0 success, 2 configuration error, 3 when every
//! benchmark repetition failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fdsdr::bench::{run_bench, run_fit, run_simulate, FitRequest, RunConfig};
use fdsdr::{Error, KernelConfig, OptimizerConfig, ResponseKind};

#[derive(Parser)]
#[command(name = "fdsdr", version, about = "Central-subspace estimation for metric space-valued responses")]
struct Cli {
    /// Size of the worker thread pool (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and write it as CSV files.
    Simulate(SimulateArgs),
    /// Run repeated generate-fit cycles and aggregate errors and timings.
    Bench(BenchArgs),
    /// Fit a subspace to predictor/response CSV files.
    Fit(FitArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Run-config TOML with a [scenario] section.
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (defaults to the config's bench.output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Run-config TOML with [scenario], [kernel], [optimizer], [bench].
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of repetitions.
    #[arg(long)]
    reps: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Predictor matrix CSV (one row per observation).
    #[arg(long)]
    x: PathBuf,
    /// Response CSV matching --response-kind.
    #[arg(long)]
    responses: PathBuf,
    /// vector | quantile | symmatrix | sphere
    #[arg(long)]
    response_kind: String,
    /// Target subspace dimension.
    #[arg(long)]
    d: usize,
    /// Optional run-config TOML providing [kernel] and [optimizer].
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for beta_hat.csv, projected.csv, trace.json.
    #[arg(long, default_value = "fdsdr_out")]
    out: PathBuf,
    /// Optional true basis CSV; the subspace error lands in trace.json.
    #[arg(long)]
    truth: Option<PathBuf>,
}

/// Kernel/optimizer sections of a run config; other sections are ignored
/// so a full benchmark config can be reused for fitting.
#[derive(serde::Deserialize, Default)]
#[serde(default)]
struct FitSections {
    kernel: KernelConfig,
    optimizer: OptimizerConfig,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidInput(_) | Error::Parse { .. } => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate(args) => {
            let mut cfg = RunConfig::from_toml_path(&args.config)?;
            if let Some(seed) = args.seed {
                cfg.scenario.seed = seed;
            }
            let out = args.out.unwrap_or_else(|| cfg.bench.output_dir.clone());
            run_simulate(&cfg.scenario, &out)?;
            println!("wrote X.csv, responses.csv, truth.csv, manifest.json to {}", out.display());
            Ok(0)
        }
        Command::Bench(args) => {
            let mut cfg = RunConfig::from_toml_path(&args.config)?;
            if let Some(seed) = args.seed {
                cfg.scenario.seed = seed;
            }
            if let Some(reps) = args.reps {
                cfg.bench.repetitions = reps;
            }
            if let Some(out) = args.out {
                cfg.bench.output_dir = out;
            }
            let summary = run_bench(&cfg)?;
            println!(
                "{}/{} repetitions succeeded; mean error {:.4} (sd {:.4}), mean fit {:.3}s",
                summary.successes,
                summary.records.len(),
                summary.mean_error,
                summary.sd_error,
                summary.mean_fit_seconds,
            );
            println!("results in {}", cfg.bench.output_dir.display());
            if summary.successes == 0 {
                eprintln!("error: all repetitions failed");
                return Ok(3);
            }
            Ok(0)
        }
        Command::Fit(args) => {
            let kind: ResponseKind = args.response_kind.parse()?;
            let sections = match &args.config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    toml::from_str::<FitSections>(&text)
                        .map_err(|e| Error::InvalidInput(format!("run config: {e}")))?
                }
                None => FitSections::default(),
            };
            sections.optimizer.validate()?;
            let report = run_fit(&FitRequest {
                x_path: args.x,
                responses_path: args.responses,
                response_kind: kind,
                d: args.d,
                kernel: sections.kernel,
                optimizer: sections.optimizer,
                seed: args.seed,
                output_dir: args.out.clone(),
                truth_path: args.truth,
            })?;
            println!(
                "fit finished in {:.3}s (objective {:.6}, {} iterations); outputs in {}",
                report.fit_seconds,
                report.objective_final,
                report.iters_used,
                args.out.display(),
            );
            if let Some(err) = report.subspace_error_vs_truth {
                println!("subspace error vs truth: {err:.6}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
