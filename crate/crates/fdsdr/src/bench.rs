//! Monte-Carlo benchmark harness and file-based front ends.
//!
//! [`run_simulate`] writes a generated dataset to CSV files, [`run_bench`]
//! repeats generate-fit cycles and aggregates subspace errors and fit times,
//! and [`run_fit`] estimates a subspace for user-supplied CSV data. All
//! three are thin orchestration layers over the library modules so the CLI
//! binary stays trivial.
//!
//! Repetition `r` of a benchmark uses seed `base_seed + r` for both data
//! generation and fitting; records are written in repetition order however
//! the worker pool schedules them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csvio::{read_matrix_csv, read_responses_csv, write_matrix_csv, write_responses_csv};
use crate::error::{Error, Result};
use crate::estimator::{fit, subspace_error, Dataset, FitReport};
use crate::kernel::KernelConfig;
use crate::metric::ResponseKind;
use crate::optim::OptimizerConfig;
use crate::sim::{generate, ScenarioSpec};

/// Benchmark section of the run config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSettings {
    /// Number of generate-fit repetitions.
    pub repetitions: usize,
    /// Target dimension; defaults to the scenario's true dimension.
    pub d: Option<usize>,
    /// Where result files are written.
    pub output_dir: PathBuf,
}

impl Default for BenchSettings {
    fn default() -> Self {
        BenchSettings {
            repetitions: 20,
            d: None,
            output_dir: PathBuf::from("fdsdr_out"),
        }
    }
}

/// Full run configuration, read from a TOML file with sections
/// `[scenario]`, `[kernel]`, `[optimizer]`, and `[bench]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub bench: BenchSettings,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::invalid(format!("run config: {e}")))?;
        cfg.scenario.validate()?;
        cfg.optimizer.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Target dimension after applying the default.
    pub fn target_dim(&self) -> usize {
        self.bench.d.unwrap_or_else(|| self.scenario.true_dim())
    }
}

/// One benchmark repetition. Failed repetitions keep their seed and status
/// but no measurements.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub repetition: usize,
    pub seed: u64,
    pub error: Option<f64>,
    pub fit_seconds: Option<f64>,
    pub iters: Option<usize>,
    pub objective_final: Option<f64>,
    pub status: String,
}

/// Aggregate results of a benchmark run.
#[derive(Debug, Clone)]
pub struct BenchSummary {
    pub records: Vec<BenchRecord>,
    pub successes: usize,
    pub mean_error: f64,
    pub sd_error: f64,
    pub mean_fit_seconds: f64,
    pub sd_fit_seconds: f64,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Summarize records over the successful repetitions.
pub fn summarize(records: Vec<BenchRecord>) -> BenchSummary {
    let errors: Vec<f64> = records.iter().filter_map(|r| r.error).collect();
    let times: Vec<f64> = records.iter().filter_map(|r| r.fit_seconds).collect();
    let (mean_error, sd_error) = mean_sd(&errors);
    let (mean_fit_seconds, sd_fit_seconds) = mean_sd(&times);
    BenchSummary {
        successes: errors.len(),
        records,
        mean_error,
        sd_error,
        mean_fit_seconds,
        sd_fit_seconds,
    }
}

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn sanitize_status(s: &str) -> String {
    s.replace(',', ";").replace('\n', " ")
}

/// Render `results.csv` with one line per repetition.
pub fn results_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from("repetition,seed,error,fit_seconds,iters,objective_final,status\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.repetition,
            r.seed,
            opt_field(r.error),
            opt_field(r.fit_seconds),
            r.iters.map(|v| v.to_string()).unwrap_or_default(),
            opt_field(r.objective_final),
            sanitize_status(&r.status),
        );
    }
    out
}

/// Render `summary.csv` (means and standard deviations over successes).
pub fn summary_csv(summary: &BenchSummary) -> String {
    let mut out = String::from("metric,mean,sd\n");
    let _ = writeln!(out, "error,{},{}", summary.mean_error, summary.sd_error);
    let _ = writeln!(
        out,
        "fit_seconds,{},{}",
        summary.mean_fit_seconds, summary.sd_fit_seconds
    );
    out
}

/// Generate the dataset described by `spec` and write `X.csv`,
/// `responses.csv`, `truth.csv`, and `manifest.json` into `out_dir`.
pub fn run_simulate(spec: &ScenarioSpec, out_dir: &Path) -> Result<()> {
    let (dataset, truth) = generate(spec)?;
    fs::create_dir_all(out_dir)?;
    write_matrix_csv(&out_dir.join("X.csv"), dataset.x())?;
    write_responses_csv(&out_dir.join("responses.csv"), dataset.responses())?;
    write_matrix_csv(&out_dir.join("truth.csv"), &truth.basis)?;
    let manifest = serde_json::json!({
        "spec": spec,
        "response_kind": spec.response_kind().to_string(),
        "d_true": truth.d_true,
    });
    fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(())
}

/// Run one generate-fit repetition.
fn run_repetition(cfg: &RunConfig, repetition: usize) -> BenchRecord {
    let seed = cfg.scenario.seed.wrapping_add(repetition as u64);
    let spec = ScenarioSpec { seed, ..cfg.scenario };
    let outcome = (|| -> Result<(f64, f64, usize, f64)> {
        let (dataset, truth) = generate(&spec)?;
        let start = Instant::now();
        let est = fit(&dataset, &cfg.kernel, cfg.target_dim(), &cfg.optimizer, seed)?;
        let fit_seconds = start.elapsed().as_secs_f64();
        let err = subspace_error(&truth.basis, &est.beta_hat)?;
        Ok((err, fit_seconds, est.trace.iters_used, est.trace.final_objective()))
    })();
    match outcome {
        Ok((error, fit_seconds, iters, objective_final)) => BenchRecord {
            repetition,
            seed,
            error: Some(error),
            fit_seconds: Some(fit_seconds),
            iters: Some(iters),
            objective_final: Some(objective_final),
            status: "ok".into(),
        },
        Err(e) => BenchRecord {
            repetition,
            seed,
            error: None,
            fit_seconds: None,
            iters: None,
            objective_final: None,
            status: e.to_string(),
        },
    }
}

/// Run the configured number of repetitions, write `results.csv` and
/// `summary.csv`, and return the aggregate. Individual failures are
/// recorded in the status column; the summary covers successes.
pub fn run_bench(cfg: &RunConfig) -> Result<BenchSummary> {
    if cfg.bench.repetitions == 0 {
        return Err(Error::invalid("repetitions must be at least 1"));
    }
    let d = cfg.target_dim();
    if d == 0 || d > cfg.scenario.p {
        return Err(Error::invalid(format!(
            "target dimension {d} is invalid for p={}",
            cfg.scenario.p
        )));
    }
    let records: Vec<BenchRecord> = (0..cfg.bench.repetitions)
        .into_par_iter()
        .map(|r| run_repetition(cfg, r))
        .collect();
    let summary = summarize(records);
    fs::create_dir_all(&cfg.bench.output_dir)?;
    fs::write(
        cfg.bench.output_dir.join("results.csv"),
        results_csv(&summary.records),
    )?;
    fs::write(cfg.bench.output_dir.join("summary.csv"), summary_csv(&summary))?;
    Ok(summary)
}

/// Inputs of [`run_fit`].
#[derive(Debug, Clone)]
pub struct FitRequest {
    pub x_path: PathBuf,
    pub responses_path: PathBuf,
    pub response_kind: ResponseKind,
    pub d: usize,
    pub kernel: KernelConfig,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Optional basis to compare against; the error lands in the report.
    pub truth_path: Option<PathBuf>,
}

/// Fit user-supplied CSV data and write `beta_hat.csv`, `projected.csv`,
/// and `trace.json` into the output directory.
pub fn run_fit(req: &FitRequest) -> Result<FitReport> {
    let x = read_matrix_csv(&req.x_path)?;
    let responses = read_responses_csv(&req.responses_path, req.response_kind)?;
    let dataset = Dataset::new(x, responses)?;
    let start = Instant::now();
    let est = fit(&dataset, &req.kernel, req.d, &req.optimizer, req.seed)?;
    let fit_seconds = start.elapsed().as_secs_f64();
    let subspace_error_vs_truth = match &req.truth_path {
        Some(path) => {
            let truth = read_matrix_csv(path)?;
            Some(subspace_error(&truth, &est.beta_hat)?)
        }
        None => None,
    };
    fs::create_dir_all(&req.output_dir)?;
    write_matrix_csv(&req.output_dir.join("beta_hat.csv"), &est.beta_hat)?;
    write_matrix_csv(&req.output_dir.join("projected.csv"), &(dataset.x() * &est.beta_hat))?;
    let report = FitReport {
        seed: req.seed,
        d: req.d,
        kernel: est.kernel_used,
        optimizer: req.optimizer,
        objective_final: est.trace.final_objective(),
        iters_used: est.trace.iters_used,
        converged: est.trace.converged,
        restart_index_of_best: est.trace.restart_index_of_best,
        objective_per_iter: est.trace.objective_per_iter.clone(),
        fit_seconds,
        subspace_error_vs_truth,
    };
    fs::write(
        req.output_dir.join("trace.json"),
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn config_defaults_fill_in() {
        let cfg = RunConfig::from_toml_str(
            r#"
            [scenario]
            scenario = "I"
            model = 1
            predictor_scheme = "a"
            n = 40
            p = 6
            seed = 3
            "#,
        )
        .unwrap();
        assert_eq!(cfg.bench.repetitions, 20);
        assert_eq!(cfg.target_dim(), 1);
        assert_eq!(cfg.kernel, KernelConfig::default());
        assert_eq!(cfg.optimizer, OptimizerConfig::default());
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_combos() {
        assert!(RunConfig::from_toml_str(
            r#"
            [scenario]
            scenario = "I"
            model = 1
            predictor_scheme = "a"
            n = 40
            p = 6
            typo_key = 1
            "#,
        )
        .is_err());
        assert!(RunConfig::from_toml_str(
            r#"
            [scenario]
            scenario = "I"
            model = 3
            predictor_scheme = "a"
            n = 40
            p = 6
            "#,
        )
        .is_err());
    }

    #[test]
    fn summary_handles_single_and_zero_successes() {
        let rec = |rep: usize, error: Option<f64>| BenchRecord {
            repetition: rep,
            seed: rep as u64,
            error,
            fit_seconds: error.map(|_| 0.5),
            iters: error.map(|_| 10),
            objective_final: error.map(|_| 0.1),
            status: if error.is_some() { "ok".into() } else { "boom".into() },
        };
        let s = summarize(vec![rec(0, Some(0.2))]);
        assert_relative_eq!(s.mean_error, 0.2);
        assert!(s.sd_error.is_nan());
        let csv = summary_csv(&s);
        assert!(csv.contains("error,0.2,NaN"));

        let empty = summarize(vec![rec(0, None)]);
        assert_eq!(empty.successes, 0);
        assert!(empty.mean_error.is_nan());
    }

    #[test]
    fn results_csv_escapes_status_commas() {
        let rec = BenchRecord {
            repetition: 0,
            seed: 1,
            error: None,
            fit_seconds: None,
            iters: None,
            objective_final: None,
            status: "invalid input: a, b".into(),
        };
        let csv = results_csv(&[rec]);
        let line = csv.lines().nth(1).unwrap();
        assert_eq!(line.split(',').count(), 7);
    }

    #[test]
    fn mean_sd_matches_hand_computation() {
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert_relative_eq!(m, 2.5, epsilon = 1e-15);
        assert_relative_eq!(s, (5.0f64 / 3.0).sqrt(), epsilon = 1e-15);
    }
}
