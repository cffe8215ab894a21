//! `lyjump`: photon-counting statistics of a laser-driven Lyman-α transition
//! in a static electric field.
//!
//! Modes: `predict` (closed-form period statistics), `exact` (numeric
//! eigensolve vs. perturbation theory), `simulate` (renewal Monte Carlo),
//! `ratemodel` (emission-free-subensemble populations), `invert-lamb`
//! (recover Δ₃ from a measured mean dark period), `p0` (no-photon
//! probability curve). Configuration comes from a JSON file (`--config`)
//! with flags taking precedence; without one, a rescaled desk-scale
//! parameter set is used.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{load_file, resolve, Overrides};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "lyjump", version, about)]
struct Cli {
    #[command(subcommand)]
    mode: Mode,
    /// JSON config file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed for the counter-based sampler.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of Monte Carlo intervals (simulate).
    #[arg(long, global = true)]
    n: Option<u64>,
    /// Dark-period threshold T0 in seconds (defaults to sqrt(T_D/gamma)).
    #[arg(long, global = true, allow_negative_numbers = true)]
    t0: Option<f64>,
    /// Directory for output artifacts (default: current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Mode {
    /// Closed-form period statistics (T_D, T_L, p, tau_L, T0) as JSON.
    Predict,
    /// Exact eigenvalues of the conditional generator and the
    /// perturbative-vs-numeric deviation.
    Exact,
    /// Sample emission intervals (CSV) and classify light/dark periods.
    Simulate,
    /// Emission-free-subensemble population curves (CSV).
    Ratemodel,
    /// Solve the sixth-degree inversion of T_D for delta3.
    #[command(name = "invert-lamb")]
    InvertLamb {
        /// Measured mean dark period, seconds.
        #[arg(long, allow_negative_numbers = true)]
        td: Option<f64>,
    },
    /// No-photon probability and waiting density on a log-spaced grid (CSV).
    P0,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => Some(load_file(path)?),
        None => None,
    };
    let td = match &cli.mode {
        Mode::InvertLamb { td } => *td,
        _ => None,
    };
    let overrides = Overrides {
        seed: cli.seed,
        n: cli.n,
        t0: cli.t0,
        td,
        out: cli.out.clone(),
    };
    let cfg = resolve(file, &overrides)?;
    if !cfg.out_dir.exists() {
        std::fs::create_dir_all(&cfg.out_dir)?;
    }
    match cli.mode {
        Mode::Predict => commands::predict(&cfg),
        Mode::Exact => commands::exact(&cfg),
        Mode::Simulate => commands::simulate(&cfg),
        Mode::Ratemodel => commands::ratemodel_cmd(&cfg),
        Mode::InvertLamb { .. } => commands::invert_lamb(&cfg),
        Mode::P0 => commands::p0_curve(&cfg),
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
