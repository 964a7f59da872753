//! Command-line orchestration for `rotorfe`: model files in, CSV files out.

pub mod commands;
pub mod output;
pub mod schema;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rotorfe::{DofIndex, RotorError};

pub use commands::run;
pub use schema::parse_model_file;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, unreadable or invalid model documents.
    #[error("{0}")]
    Input(String),
    /// Solver failures.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<RotorError> for CliError {
    fn from(e: RotorError) -> Self {
        match e {
            RotorError::InvalidModel(_) | RotorError::InactiveDof(_) | RotorError::InvalidArgument(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "rotorfe", version, about = "Finite-element rotordynamics: modes, Campbell diagrams, critical speeds, receptances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON model document.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,

    /// Output CSV path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Uniform temperature rise of an axially fixed shaft, K.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta_t_k: Option<f64>,

    #[arg(long, global = true, value_enum)]
    pub thermal_mode: Option<ThermalModeArg>,

    /// Prescribed axial force, N (tension positive).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub axial_force_n: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThermalModeArg {
    Fixed,
    Force,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Complex modes at one spin speed.
    Modes {
        /// Spin speed; defaults to the model's `speed_rpm`, else 0.
        #[arg(long)]
        rpm: Option<f64>,
    },
    /// Tracked branch frequencies over a speed grid.
    Campbell {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Also write `<out-stem>_no_prestress.csv` on the same grid.
        #[arg(long)]
        compare: bool,
    },
    /// Crossings of the branches with an excitation-order line.
    Critical {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, default_value_t = 1.0)]
        order: f64,
    },
    /// Receptance between two DOFs.
    Frf(FrfArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    pub min_rpm: f64,
    #[arg(long)]
    pub max_rpm: f64,
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct FrfArgs {
    /// Response DOF, `node:<id>:<y|z|ty|tz>`.
    #[arg(long)]
    pub resp: DofIndex,
    /// Excitation DOF.
    #[arg(long)]
    pub exc: DofIndex,
    #[arg(long, default_value_t = 0.0)]
    pub fmin_hz: f64,
    #[arg(long)]
    pub fmax_hz: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Modal)]
    pub method: MethodArg,
    /// Spin speed; defaults to the model's `speed_rpm`, else 0.
    #[arg(long)]
    pub rpm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Modal,
    Real13,
    Direct,
    All,
}
