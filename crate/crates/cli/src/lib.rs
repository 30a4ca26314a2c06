//! Command-line front end of the `grreduce` toolkit: configuration,
//! subcommands and machine-readable reports.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use config::{Overrides, RunConfig, Tolerances};

/// Version tag written into every JSON report.
pub const SCHEMA: &str = "grreduce/1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] grreduce::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "grreduce", version, about = "Moment maps, reductions and Lagrangian cycles of Gr(1,n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cross-check the moment-map formulas, the sum identity, the Hamiltonian
    /// identity and flow invariance on random lines.
    VerifyMoment {
        /// Append a point off the Plücker quadric (negative control).
        #[arg(long, hide = true)]
        inject_corrupt: bool,
    },
    /// Sample the moment image of a fiber and compare it with the Delzant polytope.
    Delzant,
    /// Finite-difference Lagrangian check of a cycle family.
    VerifyLagrangian {
        /// Pair a complex direction instead of the cycle frame (negative control).
        #[arg(long)]
        control: bool,
    },
    /// Enumerate the cycle types (k, m) and check the closed count.
    CountTypes,
    /// Dump Plücker vectors of points on the level set as CSV.
    LevelSample {
        /// Draw real bases instead of complex ones.
        #[arg(long)]
        real: bool,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Moment targets, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub c: Option<Vec<f64>>,
    /// Conjugate pairs such as "0-1,2-3".
    #[arg(long, global = true)]
    pub pairs: Option<String>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub fd_step: Option<f64>,
    #[arg(long, global = true)]
    pub tau_pluck: Option<f64>,
    #[arg(long, global = true)]
    pub tau_solve: Option<f64>,
    #[arg(long, global = true)]
    pub tau_lag: Option<f64>,
    #[arg(long, global = true)]
    pub tau_open: Option<f64>,
    /// TOML file with any of the settings above; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            n: self.n,
            k: self.k,
            c: self.c.clone(),
            pairs: self.pairs.clone().map(config::PairList::Text),
            samples: self.samples,
            seed: self.seed,
            fd_step: self.fd_step,
            tolerances: config::ToleranceOverrides {
                tau_pluck: self.tau_pluck,
                tau_solve: self.tau_solve,
                tau_lag: self.tau_lag,
                tau_open: self.tau_open,
            },
        }
    }

    /// Defaults, then the config file, then the flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => Overrides::from_toml_file(path)?,
            None => Overrides::default(),
        };
        RunConfig::resolve(&file.layered(self.overrides()))
    }
}

/// What a command produced: text for stdout and stderr and the exit code.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

/// A JSON report with the shared header.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub config: &'a RunConfig,
    #[serde(flatten)]
    pub body: T,
}

pub fn run(cli: &Cli) -> Outcome {
    let result = cli.flags.resolve().and_then(|config| match &cli.command {
        Command::VerifyMoment { inject_corrupt } => commands::verify_moment(&config, &cli.flags, *inject_corrupt),
        Command::Delzant => commands::delzant(&config, &cli.flags),
        Command::VerifyLagrangian { control } => commands::verify_lagrangian(&config, &cli.flags, *control),
        Command::CountTypes => commands::count_types(&config, &cli.flags),
        Command::LevelSample { real } => commands::level_sample(&config, &cli.flags, *real),
    });
    result.unwrap_or_else(|e| Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), exit_code: e.exit_code() })
}
