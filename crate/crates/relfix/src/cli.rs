//! Argument parsing.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::run::{Command, Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "relfix", version, about = "Rating relativities by iterated loss-ratio re-rating")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Iterate the loss-ratio method to a fixed point and build the rate table.
    Rate(CommonArgs),
    /// Report the convergence certificate and sampled checks only.
    Certify(CommonArgs),
    /// Leslie-Gower equilibrium: diagnostics, linear solve, and iteration.
    Lg(CommonArgs),
    /// Two-factor minimum-bias fit, compared with the loss-ratio relativities.
    Bailey(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Rating CSV (rate, certify, bailey) or model JSON (lg).
    #[arg(long)]
    pub input: PathBuf,
    /// Permissible loss ratio.
    #[arg(long, default_value_t = 1.0)]
    pub plr: f64,
    /// Stopping tolerance on successive iterates [default: 1e-10, lg 1e-12].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration budget [default: 10000, lg 100000].
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Seed for the sampled checks and random starts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Reject zero-exposure cells (default).
    #[arg(long, overrides_with = "no_strict")]
    pub strict: bool,
    /// Admit zero-exposure cells; certificates are then skipped.
    #[arg(long, overrides_with = "strict")]
    pub no_strict: bool,
    /// Lower-bound shrink factor in (0, 1) for the Leslie-Gower box.
    #[arg(long, default_value_t = 0.5)]
    pub shrink: f64,
    /// Cell to use as the base, e.g. `2,0,1`.
    #[arg(long, value_delimiter = ',')]
    pub base_cell: Option<Vec<usize>>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        let (command, a) = match self.command {
            Cmd::Rate(a) => (Command::Rate, a),
            Cmd::Certify(a) => (Command::Certify, a),
            Cmd::Lg(a) => (Command::Lg, a),
            Cmd::Bailey(a) => (Command::Bailey, a),
        };
        RunConfig {
            command,
            input: a.input,
            plr: a.plr,
            tolerance: a.tol,
            max_iters: a.max_iters,
            seed: a.seed,
            format: a.format,
            strict: !a.no_strict,
            shrink: a.shrink,
            base_cell: a.base_cell,
            out: a.out,
        }
    }
}
