use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ddwave::ModelParams;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "ddwave", version, about = "Solitary waves of the double dispersion equation")]
pub struct Cli {
    /// Output directory.
    #[arg(short = 'o', long = "out", global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the traveling wave and report its functionals.
    Wave(WaveArgs),
    /// Classify the convexity region of d for one p and several mu.
    Region(RegionArgs),
    /// Zero set of G in the (z, p) plane and the critical mu curve.
    Atlas(AtlasArgs),
    /// Integrate perturbed traveling-wave data.
    Simulate(SimulateArgs),
    /// Run simulations over a grid of (p, c) in parallel.
    Sweep(SweepArgs),
    /// Randomized invariant checks across all modules.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(short = 'a', default_value_t = 1.0, allow_negative_numbers = true)]
    pub a: f64,
    /// Defaults to 0 (the Boussinesq limit).
    #[arg(short = 'b', conflicts_with = "mu", allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Ratio b/a, an alternative to -b.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(short = 'p', allow_negative_numbers = true)]
    pub p: f64,
}

impl ModelArgs {
    pub fn params(&self) -> CliResult<ModelParams> {
        Ok(match self.mu {
            Some(mu) => ModelParams::from_mu(self.a, mu, self.p)?,
            None => ModelParams::new(self.a, self.b.unwrap_or(0.0), self.p)?,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Domain length; defaults to a length that resolves the tails.
    #[arg(short = 'L', long = "length")]
    pub length: Option<f64>,
    #[arg(short = 'N', long = "points", default_value_t = 1024)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct WaveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short = 'c', allow_negative_numbers = true)]
    pub c: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(short = 'p', allow_negative_numbers = true)]
    pub p: f64,
    /// Comma-separated list; defaults to 0.1,0.3,0.5,0.7,0.9 unless -a/-b are given.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["a", "b"])]
    pub mu: Vec<f64>,
    #[arg(short = 'a', requires = "b")]
    pub a: Option<f64>,
    #[arg(short = 'b', requires = "a", allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Samples of G on [0, 1] per curve.
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
}

impl RegionArgs {
    pub fn mus(&self) -> CliResult<Vec<f64>> {
        let mus = match (self.a, self.b) {
            (Some(a), Some(b)) => vec![ModelParams::new(a, b, self.p)?.mu()],
            _ if self.mu.is_empty() => vec![0.1, 0.3, 0.5, 0.7, 0.9],
            _ => self.mu.clone(),
        };
        if let Some(bad) = mus.iter().find(|m| !(0.0..1.0).contains(*m)) {
            return Err(CliError::Usage(format!("mu must lie in [0, 1) (got {bad})")));
        }
        Ok(mus)
    }
}

#[derive(Debug, Args)]
pub struct AtlasArgs {
    #[arg(long, default_value_t = 1.25)]
    pub p_min: f64,
    #[arg(long, default_value_t = 12.0)]
    pub p_max: f64,
    /// Comma-separated mu values; 1 is admitted as the limiting curve.
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
    pub mu: Vec<f64>,
    /// Number of equally spaced p samples, endpoints included.
    #[arg(long, default_value_t = 87)]
    pub resolution: usize,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Amplitude factor of the initial data (1 = unperturbed wave).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Remove Fourier modes with 0 < |xi| < h-cut.
    #[arg(long, default_value_t = 0.0)]
    pub h_cut: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    /// Time step; defaults to the CFL-limited step.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
    #[arg(long, default_value_t = ddwave::sim::DEFAULT_BLOW_THRESHOLD)]
    pub blow_threshold: f64,
    #[arg(long)]
    pub no_dealias: bool,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short = 'c', allow_negative_numbers = true)]
    pub c: f64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(short = 'a', default_value_t = 1.0)]
    pub a: f64,
    #[arg(short = 'b', conflicts_with = "mu")]
    pub b: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Comma-separated exponents.
    #[arg(short = 'p', value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    /// Comma-separated speeds.
    #[arg(short = 'c', value_delimiter = ',', required = true)]
    pub c: Vec<f64>,
    #[command(flatten)]
    pub run: RunArgs,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Test fixture: deliberately corrupt one routine to check the suite catches it.
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}
