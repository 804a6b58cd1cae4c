//! Batch CLI over the torus Riesz library: Epstein zeta tables, expected
//! energies, determinantal samples, Monte Carlo cross-checks, and the
//! A_{s,d} versus lattice-zeta comparison data.
//!
//! Every command is deterministic given its full flag set (seed included),
//! independent of `--threads`. Data goes to `--out` or stdout, diagnostics
//! to stderr. Exit codes: 0 success, 2 usage or domain error, 3 numerical
//! failure.

mod commands;
mod par;
mod run;
mod table;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "torus-riesz", version, about = "Periodic Riesz energies and determinantal sampling on flat tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Epstein zeta values over an s-grid.
    Zeta(CommonArgs),
    /// Closed-form expected Riesz energy of a spectral support.
    #[command(name = "expected-energy")]
    ExpectedEnergy(CommonArgs),
    /// Determinantal configurations, one CSV row per point.
    Sample(CommonArgs),
    /// Monte Carlo expected energy beside the closed form with a z-score.
    #[command(name = "mc-energy")]
    McEnergy(CommonArgs),
    /// A_{s,d} against the lattice zeta on a grid (hexagonal or D4).
    Figure1(Figure1Args),
}

/// Flags shared by the subcommands. Each flag falls back to the same field
/// of the `--config` JSON file, then to the built-in default.
#[derive(Args)]
struct CommonArgs {
    /// Named lattice: Z<d>, hexagonal, D4, E8. Names other than Z<d> are
    /// scaled to covolume one.
    #[arg(long)]
    lattice: Option<String>,
    /// JSON lattice file with exactly one of "name", "basis", "gram".
    #[arg(long)]
    lattice_file: Option<std::path::PathBuf>,
    /// Single Riesz exponent.
    #[arg(long)]
    s: Option<f64>,
    /// Exponent grid "min,max,count" with count >= 2.
    #[arg(long = "s-grid")]
    s_grid: Option<String>,
    /// Spectral support: box:n | shell:N | domain:ball | coeffs:v/v/...
    /// (vector components comma-separated).
    #[arg(long)]
    support: Option<String>,
    /// Dilation count for domain supports.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Replica count for sampling commands.
    #[arg(long)]
    replicas: Option<usize>,
    /// Base RNG seed; replica k uses stream k.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; TORUS_RIESZ_THREADS is the fallback, then 1.
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Relative tolerance for Ewald summation.
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
    /// JSON defaults applied beneath explicit flags.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct Figure1Args {
    #[command(flatten)]
    common: CommonArgs,
    /// Ambient dimension: 2 (hexagonal) or 4 (D4).
    #[arg(long)]
    d: Option<usize>,
    /// Number of grid points over (0.05, d - 0.05).
    #[arg(long = "grid-count")]
    grid_count: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Zeta(args) => run::with_merged(args, commands::zeta),
        Command::ExpectedEnergy(args) => run::with_merged(args, commands::expected_energy),
        Command::Sample(args) => run::with_merged(args, commands::sample),
        Command::McEnergy(args) => run::with_merged(args, commands::mc_energy),
        Command::Figure1(args) => {
            let (d, count) = (args.d, args.grid_count);
            run::with_merged(args.common, |m| commands::figure1(m, d, count))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
