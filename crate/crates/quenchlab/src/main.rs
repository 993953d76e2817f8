//! Command-line front end: argument parsing, thread-pool setup, dispatch,
//! and the exit-code contract (0 success, 1 configuration failure,
//! 2 numerical or I/O failure) with machine-readable JSON on stderr.

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use commands::FigKind;
use config::load_config;
use error::CliError;
use quenchlab_core::observables::Chirality;
use std::path::PathBuf;
use std::process::ExitCode;

const AFTER_HELP: &str = "Units: x in wall lengths l, t in l/v_F, densities in 1/l, currents in v_F/l.\n\
     Config grammar: see README.md in the repository root.\n\
     QUENCHLAB_THREADS overrides the rayon worker count (default: all cores).";

#[derive(Parser)]
#[command(
    name = "quenchlab",
    version,
    about = "Domain-wall quench observables for the interacting Luttinger model",
    color = clap::ColorChoice::Never,
    after_help = AFTER_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config against the full admissibility report and echo it.
    Validate { config: PathBuf },
    /// Total density on the configured space-time grid.
    Density { config: PathBuf },
    /// Current on the configured space-time grid.
    Current { config: PathBuf },
    /// Equal-time fermion correlator slice against a fixed reference point.
    Correlator {
        config: PathBuf,
        /// Chirality branch of the correlator.
        #[arg(long, value_enum, default_value_t = ChiralityArg::Plus)]
        chirality: ChiralityArg,
        /// Reference point held fixed while x sweeps the grid.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        y: f64,
    },
    /// Closed-form steady-state current, chemical-potential gap, and conductance.
    Steady { config: PathBuf },
    /// Steady values over a grid of initial and post-quench couplings.
    Sweep {
        config: PathBuf,
        /// Initial couplings, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "-0.9,-0.45,0,0.45,0.9", allow_hyphen_values = true)]
        lambda_values: Vec<f64>,
        /// Post-quench couplings, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "-0.9,-0.45,0,0.45,0.9", allow_hyphen_values = true)]
        lambda_prime_values: Vec<f64>,
    },
    /// Finite-ring to thermodynamic-limit gaps at one space-time point.
    FiniteSize {
        config: PathBuf,
        /// Ring circumferences, comma separated, strictly ascending.
        #[arg(long, value_delimiter = ',', default_value = "25,50,100,200")]
        rings: Vec<f64>,
        /// Mode cutoff for the ring sums.
        #[arg(long, default_value_t = 20_000)]
        n_max: usize,
        /// Evaluation point.
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        x: f64,
        /// Evaluation time.
        #[arg(long, default_value_t = 0.5)]
        t: f64,
    },
    /// Two-coupling dispersion, winding numbers, and conductance report.
    GologyCheck { config: PathBuf },
    /// Write the preset density dataset (main panel plus coupling scan).
    Fig3 {
        /// Output directory for the CSV files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Spatial points per file.
        #[arg(long, default_value_t = 601)]
        nx: u32,
    },
    /// Write the preset current dataset (main panel plus coupling scan).
    Fig4 {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 601)]
        nx: u32,
    },
    /// Fit the late-time approach of the current to its steady value.
    DecayFit {
        config: PathBuf,
        /// Evaluation point.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x: f64,
        /// Sample times past the front, comma separated, strictly ascending.
        #[arg(long, value_delimiter = ',', default_value = "10,20,50,100")]
        times: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChiralityArg {
    Plus,
    Minus,
}

impl From<ChiralityArg> for Chirality {
    fn from(arg: ChiralityArg) -> Self {
        match arg {
            ChiralityArg::Plus => Chirality::Plus,
            ChiralityArg::Minus => Chirality::Minus,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.kind() == clap::error::ErrorKind::DisplayHelp
            || e.kind() == clap::error::ErrorKind::DisplayVersion =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Parse(e.to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    init_threads()?;
    match command {
        Command::Validate { config } => commands::validate(&load_config(&config)?),
        Command::Density { config } => commands::density(&load_config(&config)?),
        Command::Current { config } => commands::current(&load_config(&config)?),
        Command::Correlator { config, chirality, y } => {
            commands::correlator(&load_config(&config)?, chirality.into(), y)
        }
        Command::Steady { config } => commands::steady(&load_config(&config)?),
        Command::Sweep { config, lambda_values, lambda_prime_values } => {
            commands::sweep(&load_config(&config)?, &lambda_values, &lambda_prime_values)
        }
        Command::FiniteSize { config, rings, n_max, x, t } => {
            commands::finite_size(&load_config(&config)?, &rings, n_max, x, t)
        }
        Command::GologyCheck { config } => commands::gology_check(&load_config(&config)?),
        Command::Fig3 { out, nx } => commands::fig(FigKind::Density, &out, nx),
        Command::Fig4 { out, nx } => commands::fig(FigKind::Current, &out, nx),
        Command::DecayFit { config, x, times } => {
            commands::decay_fit(&load_config(&config)?, x, &times)
        }
    }
}

/// Builds the global rayon pool once, honoring QUENCHLAB_THREADS so runs
/// can pin the worker count; results are byte-identical either way.
fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QUENCHLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Parse(format!("QUENCHLAB_THREADS must be a positive integer, got `{raw}`"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Io(format!("cannot build thread pool: {e}")))
}
