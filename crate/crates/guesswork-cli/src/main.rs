use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use guesswork_cli::commands;
use guesswork_core::asymptotic::LogBase;

/// Brute-force guessing analysis for multi-user systems: exact
/// finite-length distributions, long-string asymptotics and seeded
/// simulation.
#[derive(Parser)]
#[command(name = "guesswork", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IoArgs {
    /// Problem configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the generated files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Renyi, sCGF and rate curves plus the asymptotic report.
    Analyze {
        #[command(flatten)]
        io: IoArgs,
        /// Rate-curve grid points (default 2048).
        #[arg(long)]
        grid: Option<usize>,
        /// Report entropies and rates in bits (default).
        #[arg(long, conflicts_with = "nats")]
        bits: bool,
        /// Report entropies and rates in nats.
        #[arg(long)]
        nats: bool,
    },
    /// Exact finite-length guesswork distributions.
    Exact {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Seeded Monte Carlo estimation beyond enumeration.
    Simulate {
        #[command(flatten)]
        io: IoArgs,
        /// Simulation seed; overrides the config's "seed".
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit a figure dataset: fig1-left, fig1-right, fig2 or fig3.
    Figures {
        which: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Grid resolution (fig2: rate points; fig3: axis steps).
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Run the built-in fixture checks.
    Verify,
}

fn run(cli: Cli) -> Result<(), guesswork_cli::CliError> {
    match cli.command {
        Command::Analyze {
            io,
            grid,
            bits: _,
            nats,
        } => {
            let base = if nats { LogBase::Nats } else { LogBase::Bits };
            commands::analyze(&io.config, &io.out, grid, base)
        }
        Command::Exact { io } => commands::exact(&io.config, &io.out),
        Command::Simulate { io, seed } => commands::simulate(&io.config, &io.out, seed),
        Command::Figures { which, out, grid } => commands::figures_cmd(&which, &out, grid),
        Command::Verify => commands::verify_cmd(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
