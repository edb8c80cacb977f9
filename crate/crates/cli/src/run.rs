//! Subcommand implementations. Each builds a [`Report`] from a resolved
//! [`RunConfig`]; nothing here touches the filesystem.

use gsq_core::benchmark::{ground_state, BenchmarkDiagnostics};
use gsq_core::cubic::{chi_from_chi_prime, cubic_operator, CubicParams};
use gsq_core::husimi::HusimiGrid;
use gsq_core::minimize::log_grid;
use gsq_core::oscillator::{cv_xi_resource, FockSpace};
use gsq_core::spin::dicke_state;
use gsq_core::squeezing::{chi_prime_range_for_chi, dicke_superposition_with, DickeSuperposition, SqueezingDiagnostics};
use gsq_core::{QuantumState, RotationSpec, SpinSystem, Squeezer, SqueezingResult};
use serde::Serialize;

use crate::config::{Command, HusimiState, RunConfig};
use crate::error::Result;
use crate::report::{Cell, Report};

pub const RESULT_COLUMNS: &[&str] = &[
    "n_atoms",
    "gamma",
    "chi_prime",
    "chi",
    "numerator",
    "denominator",
    "xi",
    "xi_db",
    "alpha",
    "beta",
    "gamma_euler",
    "benchmark_t",
    "benchmark_g",
    "singular",
    "converged",
];
pub const SWEEP_CHI_COLUMNS: &[&str] = &["chi_prime", "chi", "numerator", "denominator", "xi", "xi_db", "singular"];
pub const SWEEP_GAMMA_COLUMNS: &[&str] = &["gamma", "numerator", "denominator", "xi", "xi_db", "singular"];
pub const SWEEP_N_COLUMNS: &[&str] = &["n_atoms", "xi", "xi_db", "chi_prime_opt", "chi_opt", "numerator", "denominator"];
pub const HUSIMI_COLUMNS: &[&str] = &["theta", "phi", "q", "u", "v"];

/// A report plus whether its headline value hit a singular benchmark.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub singular: bool,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::XiSpecific => xi_specific(cfg),
        Command::XiResource => xi_resource(cfg),
        Command::XiPrepare => xi_prepare(cfg),
        Command::SweepChi => sweep_chi(cfg),
        Command::SweepGamma => sweep_gamma(cfg),
        Command::SweepN => sweep_n(cfg),
        Command::Husimi => husimi(cfg),
    }
}

fn squeezer(cfg: &RunConfig, n_atoms: usize) -> Result<Squeezer> {
    Ok(Squeezer::new(SpinSystem::new(n_atoms)?, cfg.settings())?)
}

fn test_state(cfg: &RunConfig, sys: &SpinSystem) -> Result<QuantumState> {
    Ok(dicke_superposition_with(sys, cfg.gamma, cfg.amplitudes)?)
}

#[derive(Serialize)]
struct BenchmarkSummary<'a> {
    min_variance: f64,
    optimal_t: f64,
    optimal_g: f64,
    optimal_rotation: RotationSpec,
    grid: &'a BenchmarkDiagnostics<f64>,
}

#[derive(Serialize)]
struct ResultDetails<'a> {
    use_case: String,
    rotation: RotationSpec,
    benchmark: BenchmarkSummary<'a>,
    diagnostics: &'a SqueezingDiagnostics<f64>,
}

fn details(r: &SqueezingResult) -> ResultDetails<'_> {
    let b = &r.benchmark;
    ResultDetails {
        use_case: r.use_case.to_string(),
        rotation: r.rotation,
        benchmark: BenchmarkSummary {
            min_variance: b.min_variance,
            optimal_t: b.optimal_t,
            optimal_g: b.optimal_g,
            optimal_rotation: b.optimal_rotation,
            grid: &b.diagnostics,
        },
        diagnostics: &r.diagnostics,
    }
}

fn result_row(r: &SqueezingResult, gamma: f64) -> Vec<Cell> {
    vec![
        r.n_atoms.into(),
        gamma.into(),
        r.chi_prime.into(),
        r.chi.into(),
        r.numerator_variance.into(),
        r.denominator_variance.into(),
        r.xi.into(),
        r.xi_db.into(),
        r.rotation.alpha.into(),
        r.rotation.beta.into(),
        r.rotation.gamma_euler.into(),
        r.benchmark.optimal_t.into(),
        r.benchmark.optimal_g.into(),
        r.is_singular().into(),
        r.diagnostics.converged.into(),
    ]
}

fn single(cfg: &RunConfig, r: &SqueezingResult, gamma: f64) -> Result<Outcome> {
    let mut report = Report::new(cfg, RESULT_COLUMNS);
    report.push(result_row(r, gamma));
    Ok(Outcome {
        report: report.with_details(details(r))?,
        singular: r.is_singular(),
    })
}

fn xi_specific(cfg: &RunConfig) -> Result<Outcome> {
    let q = squeezer(cfg, cfg.n_atoms)?;
    let st = test_state(cfg, q.system())?;
    let r = q.xi_specific(&st, cfg.chi_prime)?;
    single(cfg, &r, cfg.gamma)
}

fn xi_resource(cfg: &RunConfig) -> Result<Outcome> {
    let q = squeezer(cfg, cfg.n_atoms)?;
    let st = test_state(cfg, q.system())?;
    let r = q.xi_resource(&st)?;
    single(cfg, &r, cfg.gamma)
}

fn xi_prepare(cfg: &RunConfig) -> Result<Outcome> {
    let q = squeezer(cfg, cfg.n_atoms)?;
    let family = DickeSuperposition { convention: cfg.amplitudes };
    let r = q.xi_prepare(&family, cfg.chi_prime)?;
    let gamma = r.diagnostics.parameter.unwrap_or(f64::NAN);
    single(cfg, &r, gamma)
}

fn sweep_chi(cfg: &RunConfig) -> Result<Outcome> {
    let q = squeezer(cfg, cfg.n_atoms)?;
    let st = test_state(cfg, q.system())?;
    let grid = log_grid(cfg.chi_prime_min, cfg.chi_prime_max, cfg.chi_prime_points)?;
    let rows = q.xi_specific_many(&st, &grid)?;
    let mut report = Report::new(cfg, SWEEP_CHI_COLUMNS);
    for r in &rows {
        report.push(vec![
            r.chi_prime.into(),
            r.chi.into(),
            r.numerator_variance.into(),
            r.denominator_variance.into(),
            r.xi.into(),
            r.xi_db.into(),
            r.is_singular().into(),
        ]);
    }
    Ok(Outcome { report, singular: false })
}

fn sweep_gamma(cfg: &RunConfig) -> Result<Outcome> {
    let q = squeezer(cfg, cfg.n_atoms)?;
    let family = DickeSuperposition { convention: cfg.amplitudes };
    let rows = q.xi_family_scan(&family, &cfg.gamma_grid(), cfg.chi_prime)?;
    let mut report = Report::new(cfg, SWEEP_GAMMA_COLUMNS);
    for r in &rows {
        report.push(vec![
            r.diagnostics.parameter.unwrap_or(f64::NAN).into(),
            r.numerator_variance.into(),
            r.denominator_variance.into(),
            r.xi.into(),
            r.xi_db.into(),
            r.is_singular().into(),
        ]);
    }
    Ok(Outcome { report, singular: false })
}

#[derive(Serialize)]
struct SweepNDetails {
    cv_theta: f64,
    cv_shift: f64,
    cv_cutoff: usize,
    cv_singular: bool,
}

/// Resource squeezing per atom number over a fixed `χ` window, closed by the
/// oscillator limit of the same two-level superposition.
fn sweep_n(cfg: &RunConfig) -> Result<Outcome> {
    let mut report = Report::new(cfg, SWEEP_N_COLUMNS);
    for &n in &cfg.n_list {
        let (lo, hi) = chi_prime_range_for_chi(cfg.chi_min, cfg.chi_max, n);
        let settings = gsq_core::Settings {
            chi_prime_min: lo,
            chi_prime_max: hi,
            chi_prime_points: cfg.chi_points,
            ..cfg.settings()
        };
        let q = Squeezer::new(SpinSystem::new(n)?, settings)?;
        let r = q.xi_resource(&test_state(cfg, q.system())?)?;
        report.push(vec![
            n.into(),
            r.xi.into(),
            r.xi_db.into(),
            r.chi_prime.into(),
            chi_from_chi_prime(r.chi_prime, n).into(),
            r.numerator_variance.into(),
            r.denominator_variance.into(),
        ]);
    }

    let space = FockSpace::new(cfg.cutoff)?;
    let amps = dicke_superposition_with(&SpinSystem::new(4)?, cfg.gamma, cfg.amplitudes)?;
    let amps = amps.amplitudes().expect("superposition is pure");
    let mut psi = space.vacuum();
    psi[0] = amps[0];
    psi[1] = amps[1];
    let cv = cv_xi_resource(&space, &psi, cfg.chi_min, cfg.chi_max, cfg.chi_points)?;
    let cv_db = if cv.xi > 0.0 { 10.0 * cv.xi.log10() } else { f64::NEG_INFINITY };
    report.push(vec![
        "inf".into(),
        cv.xi.into(),
        cv_db.into(),
        0.0.into(),
        cv.chi.into(),
        cv.numerator_variance.into(),
        cv.denominator_variance.into(),
    ]);
    let report = report.with_details(SweepNDetails {
        cv_theta: cv.theta,
        cv_shift: cv.shift,
        cv_cutoff: cfg.cutoff,
        cv_singular: cv.singular,
    })?;
    Ok(Outcome { report, singular: false })
}

#[derive(Serialize)]
struct HusimiDetails {
    n_theta: usize,
    n_phi: usize,
    normalization: f64,
    peak_theta: f64,
    peak_phi: f64,
}

fn husimi(cfg: &RunConfig) -> Result<Outcome> {
    let sys = SpinSystem::new(cfg.n_atoms)?;
    let st = match cfg.state {
        HusimiState::Test => test_state(cfg, &sys)?,
        HusimiState::South => dicke_state(&sys, 0)?,
        HusimiState::WitnessGround => {
            sys.require_witness_size()?;
            let op = cubic_operator(&sys, &CubicParams::from_chi_prime(cfg.chi_prime, cfg.n_atoms)?)?;
            ground_state(&op).state
        }
    };
    let grid = HusimiGrid::new(&sys, &st, cfg.theta_points, cfg.phi_points)?;
    let mut report = Report::new(cfg, HUSIMI_COLUMNS);
    for p in &grid.points {
        report.push(vec![p.theta.into(), p.phi.into(), p.q.into(), p.u.into(), p.v.into()]);
    }
    let peak = grid.peak();
    let report = report.with_details(HusimiDetails {
        n_theta: grid.n_theta,
        n_phi: grid.n_phi,
        normalization: grid.normalization,
        peak_theta: peak.theta,
        peak_phi: peak.phi,
    })?;
    Ok(Outcome { report, singular: false })
}
