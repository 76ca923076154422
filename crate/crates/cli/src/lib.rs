//! Command-line driver for the couplecrack solver.

pub mod commands;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

/// Failure of a CLI run, mapped to an exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            CliError::Config(_) | CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    /// Single-line JSON error record.
    pub fn to_line(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

impl From<couplecrack::Error> for CliError {
    fn from(e: couplecrack::Error) -> Self {
        match e {
            couplecrack::Error::IllConditioned { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "couplecrack", version, about = "Mode-I crack in couple-stress elasticity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one crack problem and write densities, profiles, tip fields and a summary.
    Solve(SolveArgs),
    /// Tip ratios over a range of a/l for several Poisson ratios.
    Sweep(SweepArgs),
    /// Dislocation/disclination fields on a grid in the upper half-plane.
    Field(FieldArgs),
    /// Classical-elasticity reference results.
    Baseline(BaselineArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Loading {
    /// Poisson ratio.
    #[arg(long, default_value_t = 0.3)]
    pub nu: f64,
    /// Shear modulus.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Remote tension.
    #[arg(long, default_value_t = 1.0)]
    pub sigma0: f64,
    /// Crack half-length.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Number of integration nodes.
    #[arg(long, default_value_t = couplecrack::sie::DEFAULT_NODES)]
    pub n: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub loading: Loading,
    /// Crack-to-material length ratio a/l; `inf` for classical elasticity.
    #[arg(long, default_value_t = 10.0)]
    pub p: f64,
    /// Samples along the crack faces.
    #[arg(long, default_value_t = 101)]
    pub profile_samples: usize,
    /// Samples ahead of the tip.
    #[arg(long, default_value_t = 60)]
    pub tip_samples: usize,
    /// Nearest tip distance, in units of a.
    #[arg(long, default_value_t = 1e-4)]
    pub tip_min: f64,
    /// Farthest tip distance, in units of a.
    #[arg(long, default_value_t = 2.0)]
    pub tip_max: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub loading: Loading,
    #[arg(long, default_value_t = 0.1)]
    pub p_min: f64,
    #[arg(long, default_value_t = 200.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 24)]
    pub p_steps: usize,
    /// Space a/l values logarithmically.
    #[arg(long)]
    pub log_spaced: bool,
    /// Comma-separated Poisson ratios; overrides --nu.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.25, 0.3, 0.5])]
    pub nu_list: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FieldArgs {
    #[arg(long, default_value_t = 0.3)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Characteristic material length.
    #[arg(long, default_value_t = 1.0)]
    pub ell: f64,
    /// Burgers vector of the climb dislocation.
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
    /// Frank vector of the constrained wedge disclination.
    #[arg(long, default_value_t = 0.0)]
    pub omega: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -5.0)]
    pub x_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 5.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 21)]
    pub nx: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub y_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 5.0)]
    pub y_max: f64,
    #[arg(long, default_value_t = 11)]
    pub ny: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub loading: Loading,
    #[arg(long, default_value_t = 101)]
    pub profile_samples: usize,
    #[command(flatten)]
    pub common: Common,
}

/// Runs a parsed command; returns the written files.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Field(a) => commands::field(&a),
        Command::Baseline(a) => commands::baseline(&a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let ill = couplecrack::Error::IllConditioned {
            n: 8,
            p: 1.0,
            nu: 0.3,
            condition: 1e20,
        };
        let e = CliError::from(ill);
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_line().starts_with("{\"error\":\"numerical\""));
        let e = CliError::from(couplecrack::Error::InvalidParameter("x".into()));
        assert_eq!(e.exit_code(), 1);
        assert!(!e.to_line().contains('\n'));
    }

    #[test]
    fn parses_sweep_flags() {
        let cli = Cli::try_parse_from(["couplecrack", "sweep", "--nu-list", "0,0.5", "--log-spaced"]).unwrap();
        let Command::Sweep(s) = cli.command else { panic!() };
        assert_eq!(s.nu_list, vec![0.0, 0.5]);
        assert!(s.log_spaced);
    }
}
