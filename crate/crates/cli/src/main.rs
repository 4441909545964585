#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AbsorptionArgs, KkArgs, RetrieveArgs, SimulateArgs};
use error::CliResult;

/// Nonlinear-interferometer simulation and IR gas index/absorption retrieval.
///
/// Exit codes: 0 success, 1 I/O or unreadable data, 2 invalid
/// configuration, 3 incompatible data.
#[derive(Parser)]
#[command(name = "nlinterf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a signal-photon map (angle × wavelength) with a PGM preview.
    Simulate {
        /// Run configuration (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Evacuated gap: τ = 1, n = 1.
        #[arg(long)]
        vacuum: bool,
        /// Noise seed; overrides `seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Skip detector noise.
        #[arg(long)]
        no_noise: bool,
        /// Map path [default: <output_dir>/sample.nlmap or vacuum.nlmap].
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Retrieve idler n and α from a sample map and a vacuum reference.
    Retrieve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sample: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        /// Spectrum CSV [default: <output_dir>/spectrum.csv].
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Fit every N-th wavelength column.
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Absorption coefficient α(ν) of a line list on a uniform grid.
    Absorption {
        /// HITRAN `.par` file, or CSV line list for any other extension.
        #[arg(long)]
        lines: PathBuf,
        #[arg(long)]
        pressure_torr: f64,
        #[arg(long, default_value_t = 296.0)]
        temperature_k: f64,
        #[arg(long)]
        start_cm1: f64,
        #[arg(long)]
        stop_cm1: f64,
        #[arg(long)]
        step_cm1: f64,
        /// Gaussian instrument resolution (FWHM, cm⁻¹); 0 for none.
        #[arg(long, default_value_t = 0.0)]
        resolution_fwhm_cm1: f64,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Kramers-Kronig index n − 1 from an α(ν) CSV on a uniform grid.
    Kk {
        #[arg(long)]
        input: PathBuf,
        /// Non-resonant n − 1 added to the transform.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        baseline: f64,
        #[arg(long, short)]
        output: PathBuf,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { config, vacuum, seed, no_noise, output } => {
            let path = commands::simulate(&SimulateArgs { config, vacuum, seed, no_noise, output })?;
            println!("wrote {}", path.display());
        }
        Command::Retrieve { config, sample, reference, output, stride } => {
            let (path, summary) = commands::retrieve(&RetrieveArgs { config, sample, reference, output, stride })?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        Command::Absorption {
            lines,
            pressure_torr,
            temperature_k,
            start_cm1,
            stop_cm1,
            step_cm1,
            resolution_fwhm_cm1,
            output,
        } => {
            commands::absorption(&AbsorptionArgs {
                lines,
                pressure_torr,
                temperature_k,
                start_cm1,
                stop_cm1,
                step_cm1,
                resolution_fwhm_cm1,
                output: output.clone(),
            })?;
            println!("wrote {}", output.display());
        }
        Command::Kk { input, baseline, output } => {
            commands::kk(&KkArgs { input, baseline, output: output.clone() })?;
            println!("wrote {}", output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
