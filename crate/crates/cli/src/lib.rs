//! Configuration-driven runner: parses a TOML or JSON run config, applies
//! command-line overrides, runs one task and writes a JSON report plus a CSV
//! table. Exit status: 0 on success, 2 for an Indeterminate outcome, 1 on
//! errors.

pub mod config;
pub mod report;
pub mod tasks;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{Recipe, RunConfig, Task};
use crate::report::{input_hash, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Compute(#[from] criticality::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "criticality",
    version,
    about = "Criticality and recurrence experiments on finite truncations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Dump the model and μ as JSON.
    Build,
    /// λ(μ), γ(μ), verdict and ground-state residual.
    Spectrum,
    /// Verdict per truncation level with the extrapolated λ.
    Classify,
    /// Capacities over an exhaustion and the recurrence verdict.
    Capacity,
    /// Cross-energy test of the K_H class.
    Khtest,
    /// Certificate that ν = μ/Rμ is critical.
    CriticalCert,
    /// Fit of the constant in ν = μ/Rμ.
    Hardy,
    /// Feynman–Kac Monte Carlo estimate.
    Simulate,
    /// κ(δ) and λ(μ^δ) over a δ grid.
    Sweep,
}

impl Command {
    pub fn task(self) -> Task {
        match self {
            Command::Build => Task::Build,
            Command::Spectrum => Task::Spectrum,
            Command::Classify => Task::Classify,
            Command::Capacity => Task::Capacity,
            Command::Khtest => Task::Khtest,
            Command::CriticalCert => Task::CriticalCert,
            Command::Hardy => Task::Hardy,
            Command::Simulate => Task::Simulate,
            Command::Sweep => Task::Sweep,
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    /// Run config (TOML, or JSON by extension).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for `<task>.json` and `<task>.csv`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Primary tolerance of the task (verdict band, or recurrence tolerance for `capacity`).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Exhaustion levels, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true, env = "CRITICALITY_THREADS")]
    pub threads: Option<usize>,
    /// Print the JSON report instead of the text rendering.
    #[arg(long, global = true)]
    pub json: bool,
}

/// The config with the command-line overrides and the task folded in.
pub fn resolve(
    mut config: RunConfig,
    task: Task,
    options: &Options,
) -> Result<RunConfig, CliError> {
    if let Some(t) = config.task {
        if t != task {
            return Err(CliError::Config(format!(
                "config is for task {} but {} was requested",
                t.name(),
                task.name()
            )));
        }
    }
    config.task = Some(task);
    if let Some(tol) = options.tol {
        match task {
            Task::Capacity => config.tolerances.recurrence = tol,
            _ => config.tolerances.classify = tol,
        }
    }
    if let Some(levels) = &options.levels {
        config.exhaustion.levels = levels.clone();
    }
    if options.seed.is_some() {
        config.seed = options.seed;
    }
    if options.out.is_some() {
        config.out = options.out.clone();
    }
    config.validate(task)?;
    Ok(config)
}

/// Runs a resolved config on a pool of `threads` workers.
pub fn execute(config: &RunConfig, threads: Option<usize>) -> Result<Report, CliError> {
    let task = config
        .task
        .ok_or_else(|| CliError::Config("no task selected".into()))?;
    let extra = match &config.recipe {
        Recipe::Model(spec) => vec![tasks::read_model_file(&spec.path)?.0],
        _ => Vec::new(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let out = pool.install(|| tasks::run_task(task, config))?;
    Ok(Report {
        task: task.name().to_string(),
        status: out.status,
        input_hash: input_hash(config, &extra),
        config: config.clone(),
        result: out.result,
        summary: out.summary,
        table: out.table,
    })
}

/// Parses, resolves, executes and writes the artifacts of one invocation.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let path = cli
        .options
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <file> is required".into()))?;
    let config = resolve(RunConfig::load(path)?, cli.command.task(), &cli.options)?;
    let report = execute(&config, cli.options.threads)?;
    if let Some(dir) = &config.out {
        report.write(dir)?;
    }
    Ok(report)
}
