//! Batch driver: `stable-entropy <suite> --alpha .. --eta .. [--source x.json]`.
//!
//! Exit status 0 when every check passes, 1 when a check fails or a
//! computation errors, 2 for invalid configuration.

mod args;
mod output;
mod suites;

use std::process::ExitCode;

use clap::Parser;
use rayon::prelude::*;
use stable_entropy::source::SourceDistribution;
use thiserror::Error;

use args::{parse_grid, Cli, Command};
use suites::{Context, Job, Level};

pub const THREADS_ENV: &str = "STABLE_DEBRUIJN_THREADS";

#[derive(Debug, Error)]
enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] stable_entropy::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn plan(cmd: &Command) -> Result<(Context, Vec<Job>), CliError> {
    let c = cmd.common();
    if c.alpha.is_empty() {
        return Err(CliError::Config("--alpha needs at least one value".into()));
    }
    if let Some(a) = c.alpha.iter().find(|a| !(**a > 0.0 && **a < 2.0)) {
        return Err(CliError::Config(format!("alpha must lie in (0, 2), got {a}")));
    }
    if let Some(e) = c.eta.iter().chain(&c.b).find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(CliError::Config(format!(
            "dispersions and window endpoints must be positive, got {e}"
        )));
    }
    let window_suite = matches!(cmd, Command::Bounds(_) | Command::CertifyAll(_));
    let levels: Vec<Level> = if window_suite {
        let bs: Vec<f64> = if c.b.is_empty() {
            c.eta.iter().map(|e| 2.0 * e / 3.0).collect()
        } else {
            c.b.clone()
        };
        bs.into_iter().map(Level::Window).collect()
    } else {
        c.eta.iter().copied().map(Level::Eta).collect()
    };
    if levels.is_empty() {
        let need = if window_suite { "--b or --eta" } else { "--eta" };
        return Err(CliError::Config(format!("{need} needs at least one value")));
    }
    let config = c.quadrature();
    config.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let source = match &c.source {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read source {}: {e}", p.display())))?;
            SourceDistribution::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => SourceDistribution::point(0.0)?,
    };
    let grid = parse_grid(&c.grid).map_err(CliError::Config)?;
    if matches!(cmd, Command::Mc(_)) && c.samples < 2 {
        return Err(CliError::Config("--samples must be at least 2".into()));
    }
    let jobs = c
        .alpha
        .iter()
        .flat_map(|&alpha| levels.iter().map(move |&level| Job { alpha, level }))
        .collect();
    let ctx = Context {
        command: cmd.clone(),
        config,
        source,
        grid,
    };
    Ok((ctx, jobs))
}

fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (ctx, jobs) = plan(&cli.command)?;
    let pool = worker_pool()?;
    let common = cli.command.common();
    let dir = common.output.join(cli.command.suite());
    std::fs::create_dir_all(&dir)?;
    let results: Vec<_> = pool.install(|| jobs.par_iter().map(|job| suites::run_job(&ctx, job)).collect());
    let mut all_pass = true;
    for (job, result) in jobs.iter().zip(results) {
        let outcome = result?;
        let path = output::write_report(&dir, &job.stem(), common.format, &outcome)?;
        if outcome.failures.is_empty() {
            println!("PASS {}", path.display());
        } else {
            all_pass = false;
            eprintln!("FAIL {}: {}", path.display(), outcome.failures.join(", "));
        }
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
