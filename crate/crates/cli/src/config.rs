//! Run configuration: command-line flags layered over an optional JSON file,
//! resolved against per-command defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use gsq_core::{AmplitudeConvention, RotationMode};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    XiSpecific,
    XiResource,
    XiPrepare,
    SweepChi,
    SweepGamma,
    SweepN,
    Husimi,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::XiSpecific => "xi-specific",
            Command::XiResource => "xi-resource",
            Command::XiPrepare => "xi-prepare",
            Command::SweepChi => "sweep-chi",
            Command::SweepGamma => "sweep-gamma",
            Command::SweepN => "sweep-n",
            Command::Husimi => "husimi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// State rendered by the `husimi` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HusimiState {
    /// Two-level Dicke superposition at `--gamma`.
    #[default]
    Test,
    /// Ground state of the cubic witness at `--chi-prime`.
    WitnessGround,
    /// Coherent state at the south pole.
    South,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum ModeArg {
    Calibrated,
    Scanned,
    Refined,
}

impl From<ModeArg> for RotationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Calibrated => RotationMode::Calibrated,
            ModeArg::Scanned => RotationMode::Scanned,
            ModeArg::Refined => RotationMode::Refined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AmplitudeArg {
    Sqrt,
    Linear,
}

impl From<AmplitudeArg> for AmplitudeConvention {
    fn from(a: AmplitudeArg) -> Self {
        match a {
            AmplitudeArg::Sqrt => AmplitudeConvention::Sqrt,
            AmplitudeArg::Linear => AmplitudeConvention::Linear,
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the command defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long)]
    pub n_atoms: Option<usize>,
    /// Weight of the lowest Dicke level in the test superposition.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub chi_prime: Option<f64>,
    #[arg(long)]
    pub chi_prime_min: Option<f64>,
    #[arg(long)]
    pub chi_prime_max: Option<f64>,
    #[arg(long)]
    pub chi_prime_points: Option<usize>,
    /// Lower end of the size-independent `chi` range used by sweep-n.
    #[arg(long)]
    pub chi_min: Option<f64>,
    #[arg(long)]
    pub chi_max: Option<f64>,
    #[arg(long)]
    pub chi_points: Option<usize>,
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub gamma_step: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub amplitudes: Option<AmplitudeArg>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Grid points of the benchmark family parameter.
    #[arg(long)]
    pub t_points: Option<usize>,
    /// Fock-space truncation of the oscillator limit.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub theta_points: Option<usize>,
    #[arg(long)]
    pub phi_points: Option<usize>,
    #[arg(long, value_enum)]
    pub state: Option<HusimiState>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file, or a JSON report whose embedded config is reused.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Partial configuration as read from a file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    pub n_atoms: Option<usize>,
    pub gamma: Option<f64>,
    pub chi_prime: Option<f64>,
    pub chi_prime_min: Option<f64>,
    pub chi_prime_max: Option<f64>,
    pub chi_prime_points: Option<usize>,
    pub chi_min: Option<f64>,
    pub chi_max: Option<f64>,
    pub chi_points: Option<usize>,
    pub gamma_min: Option<f64>,
    pub gamma_max: Option<f64>,
    pub gamma_step: Option<f64>,
    pub n_list: Option<Vec<usize>>,
    pub amplitudes: Option<AmplitudeConvention>,
    pub mode: Option<RotationMode>,
    pub t_points: Option<usize>,
    pub cutoff: Option<usize>,
    pub theta_points: Option<usize>,
    pub phi_points: Option<usize>,
    pub state: Option<HusimiState>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl FileConfig {
    /// Reads a config object, or the `config` member of a report.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {} is not valid JSON: {e}", path.display())))?;
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        serde_json::from_value(value)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }
}

/// Fully resolved configuration. Embedded verbatim in JSON reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub n_atoms: usize,
    pub gamma: f64,
    pub chi_prime: f64,
    pub chi_prime_min: f64,
    pub chi_prime_max: f64,
    pub chi_prime_points: usize,
    pub chi_min: f64,
    pub chi_max: f64,
    pub chi_points: usize,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_step: f64,
    pub n_list: Vec<usize>,
    pub amplitudes: AmplitudeConvention,
    pub mode: RotationMode,
    pub t_points: usize,
    pub cutoff: usize,
    pub theta_points: usize,
    pub phi_points: usize,
    pub state: HusimiState,
    pub format: Format,
    /// Left out of reports so that a rerun from one does not overwrite it.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub threads: usize,
}

pub const DEFAULT_N_LIST: [usize; 8] = [4, 6, 8, 10, 20, 40, 80, 100];

impl RunConfig {
    /// Flags override the file; the file overrides the defaults.
    pub fn resolve(command: Command, flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        if let Some(c) = file.command {
            if c != command {
                return Err(CliError::Config(format!(
                    "config file is for '{}', not '{}'",
                    c.name(),
                    command.name()
                )));
            }
        }
        let (cp_min, cp_max) = match command {
            Command::SweepChi => (1e-4, 2e-3),
            _ => (1e-5, 1e-2),
        };
        let cfg = Self {
            command,
            n_atoms: flags.n_atoms.or(file.n_atoms).unwrap_or(80),
            gamma: flags.gamma.or(file.gamma).unwrap_or(0.5),
            chi_prime: flags.chi_prime.or(file.chi_prime).unwrap_or(7.96e-4),
            chi_prime_min: flags.chi_prime_min.or(file.chi_prime_min).unwrap_or(cp_min),
            chi_prime_max: flags.chi_prime_max.or(file.chi_prime_max).unwrap_or(cp_max),
            chi_prime_points: flags.chi_prime_points.or(file.chi_prime_points).unwrap_or(61),
            chi_min: flags.chi_min.or(file.chi_min).unwrap_or(0.05),
            chi_max: flags.chi_max.or(file.chi_max).unwrap_or(4.0),
            chi_points: flags.chi_points.or(file.chi_points).unwrap_or(41),
            gamma_min: flags.gamma_min.or(file.gamma_min).unwrap_or(0.0),
            gamma_max: flags.gamma_max.or(file.gamma_max).unwrap_or(1.0),
            gamma_step: flags.gamma_step.or(file.gamma_step).unwrap_or(0.01),
            n_list: flags
                .n_list
                .clone()
                .or(file.n_list)
                .unwrap_or_else(|| DEFAULT_N_LIST.to_vec()),
            amplitudes: flags.amplitudes.map(Into::into).or(file.amplitudes).unwrap_or_default(),
            mode: flags.mode.map(Into::into).or(file.mode).unwrap_or_default(),
            t_points: flags.t_points.or(file.t_points).unwrap_or(41),
            cutoff: flags.cutoff.or(file.cutoff).unwrap_or(gsq_core::oscillator::DEFAULT_CUTOFF),
            theta_points: flags.theta_points.or(file.theta_points).unwrap_or(128),
            phi_points: flags.phi_points.or(file.phi_points).unwrap_or(256),
            state: flags.state.or(file.state).unwrap_or_default(),
            format: flags.format.or(file.format).unwrap_or_default(),
            out: flags.out.clone().or(file.out),
            threads: flags.threads.or(file.threads).unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        let needs_witness = self.command != Command::Husimi && self.command != Command::SweepN;
        if needs_witness && self.n_atoms < 4 {
            return bad(format!(
                "cubic squeezing is not meaningful for N <= 3 (got n_atoms = {})",
                self.n_atoms
            ));
        }
        if self.command == Command::Husimi && self.n_atoms == 0 {
            return bad("n_atoms must be positive".into());
        }
        if self.command == Command::SweepN {
            if self.n_list.is_empty() {
                return bad("n_list must not be empty".into());
            }
            if let Some(n) = self.n_list.iter().find(|&&n| n < 4) {
                return bad(format!("n_list entries must be >= 4 (got {n})"));
            }
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma must lie in [0, 1] (got {})", self.gamma));
        }
        if !self.chi_prime.is_finite() {
            return bad("chi_prime must be finite".into());
        }
        if !(self.chi_prime_min > 0.0 && self.chi_prime_max >= self.chi_prime_min) || self.chi_prime_points == 0 {
            return bad("chi' range needs 0 < min <= max and at least one point".into());
        }
        if !(self.chi_min > 0.0 && self.chi_max >= self.chi_min) || self.chi_points == 0 {
            return bad("chi range needs 0 < min <= max and at least one point".into());
        }
        if !(0.0 <= self.gamma_min && self.gamma_min <= self.gamma_max && self.gamma_max <= 1.0) {
            return bad("gamma range needs 0 <= min <= max <= 1".into());
        }
        if self.gamma_step.is_nan() || self.gamma_step <= 0.0 {
            return bad("gamma_step must be positive".into());
        }
        if self.t_points == 0 {
            return bad("t_points must be positive".into());
        }
        if self.cutoff < 10 {
            return bad(format!("cutoff must be at least 10 (got {})", self.cutoff));
        }
        Ok(())
    }

    /// Inclusive gamma grid; the last point is clamped to `gamma_max`.
    pub fn gamma_grid(&self) -> Vec<f64> {
        let span = self.gamma_max - self.gamma_min;
        let n = (span / self.gamma_step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|k| (self.gamma_min + k as f64 * self.gamma_step).min(self.gamma_max))
            .collect()
    }

    pub fn settings(&self) -> gsq_core::Settings {
        gsq_core::Settings {
            mode: self.mode,
            t_points: self.t_points,
            chi_prime_min: self.chi_prime_min,
            chi_prime_max: self.chi_prime_max,
            chi_prime_points: self.chi_prime_points,
            ..Default::default()
        }
    }
}
