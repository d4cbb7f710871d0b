//! Command-line front end: grow graphs, solve for stationary degree
//! distributions, calibrate preference functions and compare the results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::ModelFailure;
use crate::config::{Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "cliquegraph",
    version,
    about = "Preferential attachment graphs grown by single vertices and cliques"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Base RNG seed; replication i uses seed + i
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    #[arg(long, global = true, value_name = "N")]
    steps: Option<u64>,

    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Fixed-point tolerance of the stationary solver
    #[arg(long, global = true, value_name = "REAL")]
    tol: Option<f64>,

    /// Last degree of the stationary table
    #[arg(long, global = true, value_name = "N")]
    kmax: Option<u32>,

    #[arg(long, global = true, value_name = "N")]
    replications: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grow graphs and write edge lists, statistics and empirical VDDs
    Generate,
    /// Compute the stationary VDD for a preference function
    Solve,
    /// Recover a preference function from a target VDD
    Calibrate,
    /// Compare a grown graph with the stationary VDD
    Analyze {
        /// Edge list to analyze (defaults to `edges` in the config, then OUT/edges.tsv)
        #[arg(long, value_name = "PATH")]
        edges: Option<PathBuf>,
    },
    /// Calibrate, verify, grow and compare in one pass
    Roundtrip,
}

/// 1 for model-level failures, 2 for usage, parse and I/O problems.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ModelFailure>() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<cliquegraph::Error>() {
            return if e.is_model_failure() { 1 } else { 2 };
        }
    }
    2
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let overrides = Overrides {
        seed: cli.seed,
        steps: cli.steps,
        out: cli.out,
        tol: cli.tol,
        k_max: cli.kmax,
        replications: cli.replications,
        edges: match &cli.command {
            Command::Analyze { edges } => edges.clone(),
            _ => None,
        },
    };
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    match cli.command {
        Command::Generate => commands::cmd_generate(&cfg),
        Command::Solve => commands::cmd_solve(&cfg),
        Command::Calibrate => commands::cmd_calibrate(&cfg),
        Command::Analyze { .. } => commands::cmd_analyze(&cfg),
        Command::Roundtrip => commands::cmd_roundtrip(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
