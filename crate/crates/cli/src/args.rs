use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stable_entropy::stable::QuadratureConfig;

#[derive(Debug, Parser)]
#[command(
    name = "stable-entropy",
    version,
    about = "Entropy of sources in symmetric stable noise, with bound certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Scaled density p_η on a grid against its global bound.
    Pdf(Common),
    /// Derivatives of orders 0..=4 of p_η on a grid against their global bounds.
    Derivs(Common),
    /// Envelope, domination and lower-bound certificates for windows (b, 2b).
    Bounds(Common),
    /// Differential entropy h(X + η^{1/α} N).
    Entropy(Common),
    /// dh/dη by the integral identity and by finite differences.
    Debruijn(Common),
    /// Monte Carlo entropy estimate compared with quadrature.
    Mc(Common),
    /// Every certificate plus the derivative consistency check.
    CertifyAll(Common),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Pdf(c)
            | Command::Derivs(c)
            | Command::Bounds(c)
            | Command::Entropy(c)
            | Command::Debruijn(c)
            | Command::Mc(c)
            | Command::CertifyAll(c) => c,
        }
    }

    pub fn suite(&self) -> &'static str {
        match self {
            Command::Pdf(_) => "pdf",
            Command::Derivs(_) => "derivs",
            Command::Bounds(_) => "bounds",
            Command::Entropy(_) => "entropy",
            Command::Debruijn(_) => "debruijn",
            Command::Mc(_) => "mc",
            Command::CertifyAll(_) => "certify-all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct Common {
    /// Stability exponents, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub alpha: Vec<f64>,
    /// Dispersions, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub eta: Vec<f64>,
    /// Window endpoints b for the (b, 2b) certificates; defaults to 2η/3.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub b: Vec<f64>,
    /// Source law as JSON; defaults to a point mass at 0.
    #[arg(long)]
    pub source: Option<PathBuf>,
    #[arg(long, default_value = "output")]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Monte Carlo sample size.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Envelope crossover abscissa.
    #[arg(long, default_value_t = 50.0)]
    pub t0: f64,
    /// Evaluation grid for pdf/derivs as lo:hi:step.
    #[arg(long, default_value = "-10:10:0.5", allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_panels: Option<usize>,
    #[arg(long)]
    pub freq_cutoff_eps: Option<f64>,
    #[arg(long)]
    pub tail_switch_radius: Option<f64>,
}

impl Common {
    pub fn quadrature(&self) -> QuadratureConfig {
        let d = QuadratureConfig::default();
        QuadratureConfig {
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            max_panels: self.max_panels.unwrap_or(d.max_panels),
            freq_cutoff_eps: self.freq_cutoff_eps.unwrap_or(d.freq_cutoff_eps),
            tail_switch_radius: self.tail_switch_radius.or(d.tail_switch_radius),
        }
    }
}

/// Parses lo:hi:step into grid points, inclusive of hi.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad grid '{s}': {e}")))
        .collect::<Result<_, _>>()?;
    let [lo, hi, step] = parts[..] else {
        return Err(format!("grid must be lo:hi:step, got '{s}'"));
    };
    if !(hi >= lo && step > 0.0) || !(lo.is_finite() && hi.is_finite()) {
        return Err(format!("grid needs lo ≤ hi and step > 0, got '{s}'"));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(format!("grid '{s}' has too many points"));
    }
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}
