//! `rhowalk`: compute, validate and simulate walks on ordinals from the shell.
//!
//! Exit status: 0 on success, 2 when a checked property fails (the report is
//! still printed), 1 on usage errors (bad flags, bad notation, unreadable files).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FileConfig, Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "rhowalk", version, about = "Walks on ordinals and finite-condition posets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// TOML file with default settings.
    #[arg(long, env = "RHOWALK_CONFIG", global = true)]
    config: Option<PathBuf>,
    /// f1, f2, f3 or a family file.
    #[arg(long, global = true)]
    family: Option<String>,
    /// Tier ordinal Ω of f3.
    #[arg(long, global = true)]
    omega: Option<String>,
    /// Bound of f1 and f2.
    #[arg(long, global = true)]
    bound: Option<String>,
    /// Optional tier of f2.
    #[arg(long, global = true)]
    tier: Option<String>,
    /// Largest coefficient in sweeps.
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Exponent nesting depth in sweeps.
    #[arg(long, global = true)]
    depth: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// q, p, qc, qmu:ORD or qa:ORD,ORD,...
    #[arg(long, global = true)]
    variant: Option<String>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Skip the family check that normally runs first.
    #[arg(long, global = true)]
    no_validate: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// ρ(A, B).
    Rho { a: String, b: String },
    /// Upper and lower traces of the walk from B down to A.
    Walk { a: String, b: String },
    /// ρ over every pair of sweep points below BOUND.
    Table { bound: String },
    /// Check the family's C-sequences.
    ValidateFamily,
    /// Check a JSON condition against the selected variant.
    ValidateCond { file: PathBuf },
    /// Decide compatibility of two JSON conditions.
    Compatible { first: PathBuf, second: PathBuf },
    /// Project a condition of Q into Qc.
    ProjectQc { file: PathBuf },
    /// Project a condition of Q below MU.
    ProjectMu { file: PathBuf, mu: String },
    /// Δ-system and ρ-gap refinement of a JSON list of sets or conditions.
    Delta {
        file: PathBuf,
        /// Cap for the ρ-gap clause.
        #[arg(long)]
        nu: Option<String>,
    },
    /// Knaster harness on N random conditions.
    Knaster { n: usize },
    /// Build a generic filter from a requirement script and check its tree.
    Simulate {
        script: PathBuf,
        /// Extension steps allowed (defaults to the number of requirements).
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Run the ρ property suite over the sweep below BOUND.
    Lemmas { bound: String },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violations,
}

fn run(cli: Cli) -> Result<Status, Failure> {
    let file = match &cli.global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(&cli.global, file)?;
    commands::dispatch(&cfg, cli.command)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violations) => ExitCode::from(2),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
