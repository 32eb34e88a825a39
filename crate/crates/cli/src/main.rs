mod commands;
mod error;
mod io;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "faultloc",
    version,
    about = "Simulate line faults and locate them from sensor spectra"
)]
pub struct Cli {
    /// Write a built-in configuration (to --out, or stdout) and exit.
    #[arg(long, value_name = "NAME", value_parser = ["table1"])]
    pub seed_config: Option<String>,

    /// Case configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file; a `<out>.manifest.json` is written next to it.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Worker threads for cost sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Time-stepping PDE solver.
    Pde,
    /// Frequency-domain synthesis through the transfer function.
    Synth,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the sensor waveform for the configured fault.
    Simulate {
        #[arg(long, value_enum, default_value_t = Mode::Pde)]
        mode: Mode,
    },
    /// Magnitude spectrum of a waveform CSV.
    Spectrum {
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
    },
    /// Transfer function on the sensor frequency grid, one CSV per distance.
    Tf {
        #[arg(long, value_delimiter = ',', required = true, value_name = "M[,M...]")]
        ell: Vec<f64>,
    },
    /// Cost over a uniform distance grid.
    Sweep {
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        ell_min: f64,
        #[arg(long, default_value_t = 4000.0)]
        ell_max: f64,
        #[arg(long, default_value_t = 10.0)]
        ell_step: f64,
        #[arg(long, value_name = "RAD_S")]
        omega_cut: Option<f64>,
    },
    /// Estimate the fault distance from a waveform CSV.
    #[command(group(ArgGroup::new("start").required(true).args(["init_ell", "auto"])))]
    Locate {
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
        #[arg(long, value_name = "M", allow_hyphen_values = true)]
        init_ell: Option<f64>,
        #[arg(long)]
        auto: bool,
        #[arg(long, value_name = "RAD_S")]
        omega_cut: Option<f64>,
    },
    /// Recommended fault and sensor bandwidths for a minimum distance.
    Advise {
        #[arg(long, value_name = "M")]
        ell_min: f64,
    },
    /// Re-run the command recorded in a manifest.
    Replay {
        #[arg(long, value_name = "JSON")]
        manifest: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&args);
    match commands::run(cli, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl From<clap::Error> for CliError {
    fn from(e: clap::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}
