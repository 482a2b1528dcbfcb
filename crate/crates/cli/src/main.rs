use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chiral_scatter_cli::run::{
    cmd_effective, cmd_figure, cmd_map, cmd_spectrum, cmd_verify, CliError, GlobalOptions,
    EXIT_USAGE,
};

/// Single-photon scattering spectra for chiral emitters in a one-dimensional
/// waveguide.
#[derive(Parser)]
#[command(name = "chiral-scatter", version, about)]
struct Cli {
    /// Run configuration file (TOML)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides the config's output.dir; default "out")
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for grid evaluation (0 = automatic)
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    jobs: usize,

    /// Seed for randomized verification (overrides the config's verify.seed)
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detuning scan of all transmission channels, written as CSV
    Spectrum,
    /// Phase-detuning map in long-format CSV (phi-major row order)
    Map,
    /// Effective detuning and decay rate over a detuning scan
    Effective,
    /// Randomized cross-check of closed forms against the boundary-matching
    /// solver
    Verify,
    /// Run a named preset scan and write its data, plot script, and manifest
    Figure {
        /// Preset name (fig2a..fig6b)
        name: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = GlobalOptions {
        config: cli.config,
        out: cli.out,
        jobs: cli.jobs,
        seed: cli.seed,
    };
    let outcome: Result<u8, CliError> = match &cli.command {
        Command::Spectrum => cmd_spectrum(&opts),
        Command::Map => cmd_map(&opts),
        Command::Effective => cmd_effective(&opts),
        Command::Verify => cmd_verify(&opts),
        Command::Figure { name } => cmd_figure(&opts, name),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
