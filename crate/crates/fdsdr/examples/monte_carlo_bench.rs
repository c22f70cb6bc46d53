//! Run a seeded Monte-Carlo benchmark programmatically.
//!
//! Repeats generate-fit cycles for one scenario, prints the per-repetition
//! records, and writes results.csv / summary.csv — the same machinery behind
//! `fdsdr bench`.
//!
//! ```bash
//! cargo run --example monte_carlo_bench
//! ```

use fdsdr::bench::{run_bench, BenchSettings, RunConfig};
use fdsdr::{KernelConfig, OptimizerConfig, PredictorScheme, Scenario, ScenarioSpec};

fn main() -> fdsdr::Result<()> {
    let out_dir = std::env::temp_dir().join("fdsdr_bench_example");
    let cfg = RunConfig {
        scenario: ScenarioSpec {
            scenario: Scenario::I,
            model: 2,
            predictor_scheme: PredictorScheme::B,
            n: 200,
            p: 10,
            alpha_var: 1.0,
            nu: 0.5,
            grid_m: 100,
            seed: 100,
        },
        kernel: KernelConfig::default(),
        optimizer: OptimizerConfig::default(),
        bench: BenchSettings {
            repetitions: 10,
            d: None, // defaults to the scenario's true dimension
            output_dir: out_dir.clone(),
        },
    };

    let summary = run_bench(&cfg)?;
    println!("rep  seed  error   fit_s   iters");
    for rec in &summary.records {
        println!(
            "{:>3}  {:>4}  {:.4}  {:.3}  {:>5}",
            rec.repetition,
            rec.seed,
            rec.error.unwrap_or(f64::NAN),
            rec.fit_seconds.unwrap_or(f64::NAN),
            rec.iters.map(|i| i.to_string()).unwrap_or_default(),
        );
    }
    println!(
        "\nmean error {:.4} (sd {:.4}), mean fit {:.3}s over {} repetitions",
        summary.mean_error,
        summary.sd_error,
        summary.mean_fit_seconds,
        summary.records.len()
    );
    println!("files: {}/results.csv, {}/summary.csv", out_dir.display(), out_dir.display());
    Ok(())
}
