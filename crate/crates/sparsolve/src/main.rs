//! Command-line interface: `solve` a single instance, `sweep` success-rate
//! curves over sparsity, or `compare` the six algorithm families.
//!
//! Exit codes: 0 success (for `solve`: converged), 1 malformed input or I/O
//! failure, 2 `solve` hit the iteration cap.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sparsolve::config::{self, ConfigError};
use sparsolve::experiment::{self, ExperimentSpec};
use sparsolve::linalg::{self, RngSeed};
use sparsolve::report;
use sparsolve::solver::{self, TerminationReason, ThresholdingRule};

#[derive(Parser)]
#[command(name = "sparsolve", version, about = "Sparse recovery by iterative thresholding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolveArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the instance seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the assumed sparsity fed to the adaptive rules.
    #[arg(long)]
    sparsity_r: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV/TSV/manifest files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for trial cells (0 = one per CPU).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Shrink to m = 64, n = 256, 5 trials (sparsity scaled by 64/m).
    #[arg(long)]
    quick: bool,
    /// Override the base seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the result as JSON.
    Solve(SolveArgs),
    /// Run a success-rate sweep and write curves to the output directory.
    Sweep(SweepArgs),
    /// Sweep all six algorithm families and print a summary table.
    Compare(SweepArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Sweep(args) => cmd_sweep(&args, false),
        Command::Compare(args) => cmd_sweep(&args, true),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Experiment(#[from] experiment::ExperimentError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error(transparent)]
    Report(#[from] report::ReportError),
    #[error("{0}")]
    Invalid(String),
}

/// Prints to stdout, treating a closed pipe (e.g. `| head`) as a clean stop.
fn emit_stdout(text: &str) -> Result<(), CliError> {
    match write!(std::io::stdout(), "{text}") {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(CliError::Invalid(format!("cannot write to stdout: {e}"))),
    }
}

fn install_pool(workers: usize) -> Result<(), CliError> {
    if workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::Invalid(format!("cannot size worker pool: {e}")))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveReport {
    converged: bool,
    iterations: usize,
    termination_reason: TerminationReason,
    relative_error: Option<f64>,
    residual_norm: f64,
    nonzeros: usize,
    z_star: Vec<f64>,
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode, CliError> {
    let cfg = config::load_solve_config(&args.config)?;

    let (a, b, z_true) = if let Some(m) = cfg.instance.m {
        let n = cfg.instance.n.expect("validated");
        let k = cfg.instance.sparsity.expect("validated");
        let seed = RngSeed(args.seed.unwrap_or(cfg.instance.seed));
        let inst = experiment::make_instance(m, n, k, cfg.instance.noise_sigma, seed)?;
        (inst.a, inst.b, Some(inst.z_true))
    } else {
        let matrix = cfg.instance.matrix.as_ref().expect("validated");
        let rhs = cfg.instance.rhs.as_ref().expect("validated");
        let a = linalg::read_matrix_csv(matrix)?;
        let b = linalg::read_vector_csv(rhs)?;
        let z_true = cfg
            .instance
            .truth
            .as_ref()
            .map(|p| linalg::read_vector_csv(p))
            .transpose()?;
        (a, b, z_true)
    };

    let r = args
        .sparsity_r
        .or(cfg.algorithm.sparsity_r)
        .or(cfg.instance.sparsity)
        .ok_or_else(|| {
            CliError::Invalid("no sparsity level: set --sparsity-r or [algorithm].sparsity_r".into())
        })?;
    let entry = experiment::AlgorithmEntry {
        rule: cfg.algorithm.rule,
        p: cfg.algorithm.p,
    };
    let solver_config = cfg.solver.to_config(entry, r);
    let z0 = vec![0.0; a.cols()];
    let result = solver::solve(&a, &b, &solver_config, &z0)?;

    let relative_error = match &z_true {
        Some(zt) => Some(experiment::relative_error(&result.z_star, zt)?),
        None => None,
    };
    let az = linalg::matvec(&a, &result.z_star)?;
    let residual: Vec<f64> = b.iter().zip(&az).map(|(bi, ai)| bi - ai).collect();

    let report = SolveReport {
        converged: result.converged,
        iterations: result.iterations,
        termination_reason: result.termination_reason,
        relative_error,
        residual_norm: linalg::norm2(&residual),
        nonzeros: result.z_star.iter().filter(|v| **v != 0.0).count(),
        z_star: result.z_star,
    };
    let json = serde_json::to_string_pretty(&report).expect("serializes");
    emit_stdout(&format!("{json}\n"))?;

    Ok(match result.termination_reason {
        TerminationReason::Tolerance => ExitCode::SUCCESS,
        TerminationReason::MaxIter => ExitCode::from(2),
    })
}

fn resolve_spec(args: &SweepArgs) -> Result<ExperimentSpec, CliError> {
    let mut spec = config::load_sweep_config(&args.config)?;
    if let Some(seed) = args.seed {
        spec.base_seed = RngSeed(seed);
    }
    if args.quick {
        config::apply_quick(&mut spec);
    }
    spec.validate()?;
    Ok(spec)
}

fn run_and_emit(
    spec: ExperimentSpec,
    out: &Path,
) -> Result<Vec<experiment::SuccessCurve>, CliError> {
    std::fs::create_dir_all(out).map_err(|e| report::ReportError::Io {
        path: out.display().to_string(),
        source: e,
    })?;

    let started = Instant::now();
    let curves = experiment::run_sweep(&spec)?;
    let runtime = started.elapsed().as_secs_f64();

    for curve in &curves {
        report::write_curve_csv(out, curve)?;
    }
    report::write_combined_csv(out, &curves)?;
    report::emit_plot_data(out, &curves)?;
    let manifest = report::RunManifest::new(spec, curves, runtime);
    report::write_manifest(out, &manifest)?;
    Ok(manifest.curves)
}

fn cmd_sweep(args: &SweepArgs, compare: bool) -> Result<ExitCode, CliError> {
    install_pool(args.workers)?;
    let spec = resolve_spec(args)?;

    if compare {
        let missing: Vec<&str> = ThresholdingRule::ALL
            .iter()
            .filter(|rule| spec.algorithms.iter().all(|a| a.rule != **rule))
            .map(|rule| rule.name())
            .collect();
        if !missing.is_empty() {
            return Err(CliError::Invalid(format!(
                "compare needs all six algorithms; missing: {}",
                missing.join(", ")
            )));
        }
    }

    let curves = run_and_emit(spec, &args.out)?;

    if compare {
        emit_stdout(&report::summary_table(&curves))?;
    }
    Ok(ExitCode::SUCCESS)
}
