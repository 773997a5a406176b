#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod run;

/// Sample random (d,k)-regular hypergraphs and check their spectral,
/// mixing and expansion properties. Writes one file per seed and a
/// summary.json into the output directory.
#[derive(Parser, Debug)]
#[command(name = "hyperspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw hypergraphs and write them as JSON (or incidence CSV).
    Sample(Common),
    /// Adjacency spectrum, second eigenvalue and Ramanujan margin.
    Gap(Common),
    /// Normalised spectral distribution and its distance to the limit laws.
    Esd(Common),
    /// Non-backtracking spectrum, its classification and the gap check.
    NbSpectrum(Common),
    /// Exact and empirical mixing rates of the simple random walk.
    WalkMix {
        #[command(flatten)]
        common: Common,
        /// Largest walk length.
        #[arg(long, default_value_t = 40)]
        lmax: usize,
    },
    /// Random subset checks of the expander mixing and vertex expansion bounds.
    Expansion {
        #[command(flatten)]
        common: Common,
        /// Subset trials per theorem and seed.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Local-law comparison on fixed intervals against the growing-degree law.
    LocalLaw(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    /// A count N (seeds 0..N-1) or a comma-separated list of seeds.
    #[arg(long, default_value = "1")]
    seeds: String,
    /// Additive slack on asymptotic bounds.
    #[arg(long, default_value_t = 0.5)]
    slack: f64,
    /// Output directory.
    #[arg(long, default_value = "hyperspec-out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common, extra) = match cli.command {
        Command::Sample(c) => (run::Kind::Sample, c, run::Extra::default()),
        Command::Gap(c) => (run::Kind::Gap, c, run::Extra::default()),
        Command::Esd(c) => (run::Kind::Esd, c, run::Extra::default()),
        Command::NbSpectrum(c) => (run::Kind::NbSpectrum, c, run::Extra::default()),
        Command::WalkMix { common, lmax } => {
            (run::Kind::WalkMix, common, run::Extra { lmax, ..Default::default() })
        }
        Command::Expansion { common, trials } => {
            (run::Kind::Expansion, common, run::Extra { trials, ..Default::default() })
        }
        Command::LocalLaw(c) => (run::Kind::LocalLaw, c, run::Extra::default()),
    };
    let spec = match run::ExperimentSpec::new(kind, common, extra) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return ExitCode::from(e.code);
        }
    };
    match run::run(&spec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
