//! Command-line front end for `randseries`.
//!
//! Every run is described by an [`ExperimentConfig`], which can be built
//! from flags, from a flat `key=value` file (`--config`), or both; flags win.

pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

pub use config::{Command, ExperimentConfig, Family, Suite};
pub use output::{emit_plotdata, PlotData};
pub use run::{run, Outcome, OUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "randseries", version, about = "Random series driven by explicit bit strings")]
pub struct Cli {
    /// key=value file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Partial sums S_1..S_N of Σ ε_n u_n.
    Rademacher(Flags),
    /// Partial and Fejér sums of Σ ε_n x_n cos(2πnt + φ_n) on a grid.
    Fourier(Flags),
    /// A truncated Fourier–Wiener path on a uniform grid.
    Brownian(Flags),
    /// Standard normals built from the interleaved bit subsequences.
    Normals(Flags),
    /// C_n slope code of a sampled path.
    Encode(Flags),
    /// Sup distance between a sampled path and its C_n codes.
    Oscillation(Flags),
    /// Monte Carlo verification suites.
    Verify(Flags),
}

#[derive(Debug, Args, Default)]
pub struct Flags {
    /// Coefficient family: zero, harmonic-root, power:P, geometric:R, constant:C, file:PATH.
    #[arg(long)]
    pub family: Option<String>,
    /// Phase family for `fourier`, same syntax as --family.
    #[arg(long)]
    pub phases: Option<String>,
    #[arg(long, conflicts_with = "bits_file")]
    pub seed: Option<u64>,
    /// Read bits from a file instead of a seed.
    #[arg(long)]
    pub bits_file: Option<PathBuf>,
    /// raw or ascii.
    #[arg(long)]
    pub bits_mode: Option<String>,
    /// Bits per normal variate.
    #[arg(long)]
    pub precision: Option<u32>,
    /// Number of terms N.
    #[arg(long)]
    pub terms: Option<u64>,
    /// Number of grid points.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Code length for `encode`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated code lengths for `oscillation`.
    #[arg(long)]
    pub ns: Option<String>,
    /// kolmogorov, paley-zygmund, supnorm, brownian, divergence, fejer or all.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Trial i uses seed seed_base + i.
    #[arg(long)]
    pub seed_base: Option<u64>,
    /// Disable parallel execution.
    #[arg(long)]
    pub sequential: bool,
    /// Output file; defaults to $RANDSERIES_OUT_DIR/<command>.csv, else stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write two-column plot data here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

impl Flags {
    fn entries(&self) -> Vec<(&'static str, String)> {
        let mut e = Vec::new();
        let mut push = |k, v: Option<String>| {
            if let Some(v) = v {
                e.push((k, v));
            }
        };
        push("family", self.family.clone());
        push("phases", self.phases.clone());
        push("seed", self.seed.map(|s| s.to_string()));
        push("bits_file", self.bits_file.as_ref().map(|p| p.display().to_string()));
        push("bits_mode", self.bits_mode.clone());
        push("precision", self.precision.map(|p| p.to_string()));
        push("terms", self.terms.map(|p| p.to_string()));
        push("grid", self.grid.map(|p| p.to_string()));
        push("n", self.n.map(|p| p.to_string()));
        push("ns", self.ns.clone());
        push("suite", self.suite.clone());
        push("trials", self.trials.map(|p| p.to_string()));
        push("seed_base", self.seed_base.map(|p| p.to_string()));
        push("sequential", self.sequential.then(|| "true".to_string()));
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        push("plot", self.plot.as_ref().map(|p| p.display().to_string()));
        e
    }
}

impl Sub {
    pub fn split(&self) -> (Command, &Flags) {
        match self {
            Sub::Rademacher(f) => (Command::Rademacher, f),
            Sub::Fourier(f) => (Command::Fourier, f),
            Sub::Brownian(f) => (Command::Brownian, f),
            Sub::Normals(f) => (Command::Normals, f),
            Sub::Encode(f) => (Command::Encode, f),
            Sub::Oscillation(f) => (Command::Oscillation, f),
            Sub::Verify(f) => (Command::Verify, f),
        }
    }
}

impl Cli {
    /// Merges the config file (if any) with the flags.
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let (command, flags) = self.command.split();
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::new(command),
        };
        cfg.command = command;
        if flags.seed.is_some() {
            cfg.bits_file = None;
        }
        if flags.bits_file.is_some() {
            cfg.seed = None;
        }
        for (k, v) in flags.entries() {
            cfg.set(k, &v)?;
        }
        Ok(cfg)
    }
}
