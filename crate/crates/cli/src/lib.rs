//! `gsq` command-line driver: squeezing reports and parameter sweeps as CSV
//! or JSON.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

use std::fs::File;
use std::io::{BufWriter, Write};

use clap::{Parser, Subcommand};

pub use config::{Command, Flags, Format, RunConfig};
pub use error::{CliError, Result};
pub use report::{Cell, Report};
pub use run::Outcome;

#[derive(Debug, Parser)]
#[command(name = "gsq", version, about = "Cubic nonlinear squeezing of collective spins")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Squeezing of the test state at a fixed cubicity.
    XiSpecific(Flags),
    /// Squeezing minimized over the cubicity.
    XiResource(Flags),
    /// Squeezing minimized over the superposition weight gamma.
    XiPrepare(Flags),
    /// Numerator, benchmark and ratio on a log grid of cubicities.
    SweepChi(Flags),
    /// Squeezing on a grid of superposition weights.
    SweepGamma(Flags),
    /// Resource squeezing per atom number plus the oscillator limit.
    SweepN(Flags),
    /// Husimi Q function on a sphere grid with Hammer coordinates.
    Husimi(Flags),
}

impl Sub {
    pub fn parts(&self) -> (Command, &Flags) {
        match self {
            Sub::XiSpecific(f) => (Command::XiSpecific, f),
            Sub::XiResource(f) => (Command::XiResource, f),
            Sub::XiPrepare(f) => (Command::XiPrepare, f),
            Sub::SweepChi(f) => (Command::SweepChi, f),
            Sub::SweepGamma(f) => (Command::SweepGamma, f),
            Sub::SweepN(f) => (Command::SweepN, f),
            Sub::Husimi(f) => (Command::Husimi, f),
        }
    }
}

/// Resolves the config, computes, and writes the report to `--out` or stdout.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let (command, flags) = cli.command.parts();
    let cfg = RunConfig::resolve(command, flags)?;
    if cfg.threads > 0 {
        // only the first call in a process can size the global pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    }
    let outcome = run::execute(&cfg)?;
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            outcome.report.write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            outcome.report.write(stdout.lock())?;
        }
    }
    Ok(outcome)
}
