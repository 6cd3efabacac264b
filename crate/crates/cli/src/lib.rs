//! `helios-audit`: forecast-error audit and PV peak-energy experiments from
//! the command line.
//!
//! Exit codes: 0 success, 2 input error, 3 computation failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;
pub mod report;
pub mod svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "helios-audit", version, about = "Weather forecast error audit and PV peak-energy forecasting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Bias, MAE with bootstrap CIs, and residual ACF per variable and lead day.
    Audit,
    /// Correlation matrix and predictor selection on daily peaks.
    Select,
    /// Train the peak-energy network on observed weather.
    Train,
    /// Energy MAPE/MAE using lead-day forecasts versus observed inputs.
    Evaluate,
    /// Replace one input's forecast with its observation, per input.
    Sensitivity,
    /// Train on all 31 predictor subsets and rank them.
    Sweep,
    /// Write a synthetic dataset with known ground truth.
    Synth,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Audit => "audit",
            Command::Select => "select",
            Command::Train => "train",
            Command::Evaluate => "evaluate",
            Command::Sensitivity => "sensitivity",
            Command::Sweep => "sweep",
            Command::Synth => "synth",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Directory holding observed.csv, forecast.csv and energy.csv.
    #[arg(long = "in", value_name = "DIR", global = true)]
    pub input: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR", global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "HELIOS_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// Bootstrap resampling cycles.
    #[arg(long, default_value_t = 2500, global = true)]
    pub cycles: usize,
    #[arg(long, default_value_t = 0.95, global = true)]
    pub confidence: f64,
    /// Maximum ACF lag.
    #[arg(long, default_value_t = 100, global = true)]
    pub max_lag: usize,
    /// Minimum |r| with energy for a predictor to be kept.
    #[arg(long, default_value_t = 0.2, global = true)]
    pub target_threshold: f64,
    /// |r| above which the weaker of two predictors is dropped.
    #[arg(long, default_value_t = 0.8, global = true)]
    pub collinearity_threshold: f64,
    /// Hidden-layer neurons.
    #[arg(long, default_value_t = 3, global = true)]
    pub hidden: usize,
    /// Levenberg-Marquardt iteration cap.
    #[arg(long, default_value_t = 200, global = true)]
    pub max_iter: usize,
    /// Training restarts; the lowest validation error is kept.
    #[arg(long, default_value_t = 1, global = true)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0.8, global = true)]
    pub train_fraction: f64,
    /// PV capacity in kWh.
    #[arg(long, default_value_t = 120.0, global = true)]
    pub capacity: f64,
    /// Model inputs for `train`, e.g. SC,RH,T (default: selection result).
    #[arg(long, value_delimiter = ',', global = true)]
    pub inputs: Option<Vec<String>>,
    /// Trained model for `evaluate`/`sensitivity` (default: OUT/model.json,
    /// else train in-process).
    #[arg(long, value_name = "FILE", global = true)]
    pub model: Option<PathBuf>,
    /// Days to generate for `synth`.
    #[arg(long, default_value_t = 365, global = true)]
    pub days: usize,
    /// `synth`: forecasts equal observations.
    #[arg(long, global = true)]
    pub noiseless: bool,
    /// Skip SVG output.
    #[arg(long, global = true)]
    pub no_figures: bool,
    /// `select`: use this correlation matrix (corr.csv layout) instead of data.
    #[arg(long, value_name = "FILE", global = true, hide = true)]
    pub corr_matrix: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }
}

impl From<helios_core::Error> for CliError {
    fn from(e: helios_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Compute(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Errors go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(cli.command, &cli.opts) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("helios-audit {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
