//! `ves`: evaluate, fit and check variable-elasticity production functions.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or input error.

mod commands;
mod format;
mod params;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(ves_core::Error),
    Io(String),
}

impl From<ves_core::Error> for CliError {
    fn from(e: ves_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ves", version, about = "Variable elasticity of substitution production functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Output per worker y(k), or total output F(K, L).
    Eval(commands::EvalArgs),
    /// Least-squares fit of a log-linear relation to a data file.
    Fit(commands::FitArgs),
    /// k, y, R, R', sigma, sigma' on a log-spaced grid clipped to the validity range.
    Trajectory(commands::TrajectoryArgs),
    /// Case, limit and monotonicity of sigma(k).
    Regime(commands::RegimeArgs),
    /// Integration constant xi that puts the zero of R(k) at k0.
    CalibrateXi(commands::CalibrateArgs),
    /// Cobb-Douglas or CES form of special regression-space parameters.
    Reduce(commands::ReduceArgs),
    /// Numerical cross-checks of the closed forms.
    Verify(commands::VerifyArgs),
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let result = match cli.command {
        Command::Eval(a) => commands::eval(&a, &mut out),
        Command::Fit(a) => commands::fit(&a, &mut out),
        Command::Trajectory(a) => commands::trajectory(&a, &mut out),
        Command::Regime(a) => commands::regime(&a, &mut out),
        Command::CalibrateXi(a) => commands::calibrate_xi(&a, &mut out),
        Command::Reduce(a) => commands::reduce(&a, &mut out),
        Command::Verify(a) => commands::verify(&a, &mut out),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
