//! `citerank`: batch runs of the citation sentiment classifier and the
//! sentiment-aware paper ranking.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use citerank::evaluation::AblationMode;
use clap::{Parser, Subcommand};

use crate::config::{Flags, MissingPath, RunConfig};

#[derive(Parser)]
#[command(name = "citerank", version, about = "Citation sentiment classification and sentiment-aware ranking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Train the decision tree on the leading `--split` instances
    Train,
    /// Label instances with a trained model
    Classify,
    /// Score the model on the held-out instances
    Evaluate {
        /// Report only the all-neutral baseline
        #[arg(long)]
        baseline: bool,
        /// Retrain once per feature group instead of loading the model
        #[arg(long, value_parser = parse_mode)]
        ablate: Option<AblationMode>,
    },
    /// Rank cited papers by citation count and by M-index
    Rank,
    /// Compare two ranking CSVs
    Compare { a: PathBuf, b: PathBuf },
    /// Sweep the post-processing thresholds on the held-out instances
    GridSearch,
}

fn parse_mode(s: &str) -> Result<AblationMode, String> {
    s.parse()
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = RunConfig::resolve(cli.flags)?;
    match cli.command {
        Command::Train => commands::train(&cfg),
        Command::Classify => commands::classify(&cfg),
        Command::Evaluate { baseline, ablate } => commands::evaluate(&cfg, baseline, ablate),
        Command::Rank => commands::rank(&cfg),
        Command::Compare { a, b } => commands::compare(&cfg, &a, &b),
        Command::GridSearch => commands::grid(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<MissingPath>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
