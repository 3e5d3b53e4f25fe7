//! Command-line front end: synthesize far-field data, add noise, reconstruct,
//! check derivatives, compute cross-section tensors and run the quadrature
//! convergence study.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "thintube", version, about = "Thin tubular scatterers: forward model and shape reconstruction")]
struct Cli {
    /// Worker threads for parallel assembly (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Far field of a curve on the configured sphere grid.
    Forward {
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// `torus`, `figure`, `helix` or a curve file.
        #[arg(long)]
        curve: String,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Adds calibrated uniform noise to a far-field file.
    Noise {
        #[arg(long, value_name = "FILE")]
        data: PathBuf,
        /// Relative noise level, e.g. 0.3.
        #[arg(long)]
        level: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Reconstructs the center curve from far-field data. Writes
    /// `<out>.log.jsonl` and `<out>.curve.txt`.
    Reconstruct {
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        data: PathBuf,
        #[arg(long, value_name = "PREFIX")]
        out: PathBuf,
    },
    /// Compares analytic derivatives with finite differences on a random instance.
    CheckDerivatives {
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Overrides the seed from the configuration.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Cross-section polarization tensor of the unit disk.
    Polarization {
        gamma0: f64,
        gamma1: f64,
        #[arg(value_enum)]
        mode: Mode,
        /// Grid intervals per side for `numeric`.
        #[arg(long, default_value_t = 400)]
        resolution: usize,
    },
    /// Relative far-field error against M = 65 for M = 3, 5, 9, 17.
    Convergence {
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        #[arg(long)]
        curve: String,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Disk,
    Numeric,
}

fn init_logging() -> Result<(), String> {
    let level = match std::env::var("THINTUBE_LOG").as_deref() {
        Err(_) | Ok("info") => log::LevelFilter::Info,
        Ok("quiet") => log::LevelFilter::Off,
        Ok("debug") => log::LevelFilter::Debug,
        Ok(other) => return Err(format!("THINTUBE_LOG must be quiet, info or debug, got `{other}`")),
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_logging() {
        eprintln!("error: {msg}");
        return ExitCode::from(commands::EXIT_INPUT);
    }
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(commands::EXIT_INPUT);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool already set");
    }
    let result = match cli.command {
        Command::Forward { config, curve, out } => commands::forward(config.as_deref(), &curve, &out),
        Command::Noise { data, level, seed, out } => commands::noise(&data, level, seed, &out),
        Command::Reconstruct { config, data, out } => commands::reconstruct(config.as_deref(), &data, &out),
        Command::CheckDerivatives { config, seed } => commands::check_derivatives(config.as_deref(), seed),
        Command::Polarization { gamma0, gamma1, mode, resolution } => {
            commands::polarization(gamma0, gamma1, matches!(mode, Mode::Numeric), resolution)
        }
        Command::Convergence { config, curve, out } => commands::convergence(config.as_deref(), &curve, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
