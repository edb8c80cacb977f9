//! Squeezing parameters for the three use cases: a fixed witness
//! (`specific`), minimized over the nonlinearity (`resource`), and minimized
//! over a one-parameter family of preparable states (`prepare`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmark::{BenchmarkFamily, BenchmarkResult, BenchmarkSettings};
use crate::calibration::{
    min_over_rotations_prepared, CalibratedState, Observable, RotationMode, RotationSearch, SpinContext,
};
use crate::cubic::{chi_from_chi_prime, cubic_operator, CubicParams};
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::minimize::{argmin, golden_section, linear_grid, log_grid};
use crate::rotation::RotationSpec;
use crate::spin::{QuantumState, SpinSystem};
use crate::{real, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UseCase {
    Specific,
    Resource,
    Prepare,
}

impl std::fmt::Display for UseCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UseCase::Specific => "specific",
            UseCase::Resource => "resource",
            UseCase::Prepare => "prepare",
        })
    }
}

/// Numerical settings shared by all squeezing computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings<T: Real = f64> {
    pub mode: RotationMode,
    pub search: RotationSearch<T>,
    pub t_points: usize,
    pub t_rel_tol: T,
    pub chi_prime_min: T,
    pub chi_prime_max: T,
    /// Log-grid points per sign.
    pub chi_prime_points: usize,
    pub both_signs: bool,
    /// Relative tolerance of the golden refinement in `χ′`.
    pub chi_prime_rel_tol: T,
    /// Grid points scanned before the golden refinement of a family parameter.
    pub family_points: usize,
    pub family_tol: T,
}

impl<T: Real> Default for Settings<T> {
    fn default() -> Self {
        Self {
            mode: RotationMode::Calibrated,
            search: RotationSearch::default(),
            t_points: 41,
            t_rel_tol: real(1e-4),
            chi_prime_min: real(1e-5),
            chi_prime_max: real(1e-2),
            chi_prime_points: 61,
            both_signs: true,
            chi_prime_rel_tol: real(1e-4),
            family_points: 21,
            family_tol: real(1e-4),
        }
    }
}

impl<T: Real> Settings<T> {
    pub fn benchmark(&self) -> BenchmarkSettings<T> {
        BenchmarkSettings {
            t_points: self.t_points,
            t_rel_tol: self.t_rel_tol,
            mode: self.mode,
            search: self.search,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.chi_prime_min > T::zero() && self.chi_prime_max >= self.chi_prime_min) {
            return Err(Error::Config("chi' range must satisfy 0 < min <= max".into()));
        }
        if self.chi_prime_points == 0 || self.t_points == 0 || self.family_points == 0 {
            return Err(Error::Config("grids must contain at least one point".into()));
        }
        if self.search.scan_steps == 0 {
            return Err(Error::Config("rotation scan needs at least one step".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SqueezingDiagnostics<T: Real = f64> {
    /// Benchmark variance vanished: `ξ` is reported as infinite.
    pub singular: bool,
    /// All rotation searches converged.
    pub converged: bool,
    /// Family parameter at the optimum (prepare mode).
    pub parameter: Option<T>,
    /// Sampled `(parameter, ξ)` pairs of the outer scan, if any.
    pub scan: Vec<(T, T)>,
    /// Best `ξ` found with the opposite sign of `χ′` (resource mode).
    pub opposite_sign_xi: Option<T>,
}

#[derive(Debug, Clone)]
pub struct SqueezingResult<T: Real = f64> {
    pub xi: T,
    pub xi_db: T,
    pub numerator_variance: T,
    pub denominator_variance: T,
    pub chi: T,
    pub chi_prime: T,
    pub n_atoms: usize,
    /// Rotation of the tested state achieving the numerator.
    pub rotation: RotationSpec<T>,
    pub use_case: UseCase,
    pub benchmark: BenchmarkResult<T>,
    pub diagnostics: SqueezingDiagnostics<T>,
}

impl<T: Real> SqueezingResult<T> {
    pub fn is_singular(&self) -> bool {
        self.diagnostics.singular
    }
}

/// `10 log₁₀ ξ`, extended to `±∞` at the ends.
fn db<T: Real>(xi: T) -> T {
    if xi > T::zero() {
        real::<T>(10.0) * xi.log10()
    } else {
        -T::one() / T::zero()
    }
}

fn ratio<T: Real>(num: T, den: T, n_atoms: usize) -> (T, bool) {
    let floor = real::<T>(1e-12 * (n_atoms * n_atoms) as f64);
    if den < floor {
        (T::one() / T::zero(), true)
    } else {
        (num / den, false)
    }
}

/// Amplitude convention of the two-level Dicke superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeConvention {
    /// `√γ |0⟩ + √(1-γ) |1⟩`.
    #[default]
    Sqrt,
    /// `γ |0⟩ + (1-γ) |1⟩`, normalized.
    Linear,
}

impl std::str::FromStr for AmplitudeConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(Self::Sqrt),
            "linear" => Ok(Self::Linear),
            other => Err(Error::Config(format!("unknown amplitude convention '{other}'"))),
        }
    }
}

/// `√γ |j,-j⟩ + √(1-γ) |j,-j+1⟩`.
pub fn dicke_superposition<T: Real>(sys: &SpinSystem<T>, gamma: T) -> Result<QuantumState<T>> {
    dicke_superposition_with(sys, gamma, AmplitudeConvention::Sqrt)
}

pub fn dicke_superposition_with<T: Real>(
    sys: &SpinSystem<T>,
    gamma: T,
    convention: AmplitudeConvention,
) -> Result<QuantumState<T>> {
    if !(gamma >= T::zero() && gamma <= T::one()) {
        return Err(Error::Domain(format!("gamma must lie in [0, 1], got {}", crate::to_f64(gamma))));
    }
    if sys.dim() < 2 {
        return Err(Error::Domain("superposition needs at least two levels".into()));
    }
    let (a, b) = match convention {
        AmplitudeConvention::Sqrt => (gamma.sqrt(), (T::one() - gamma).sqrt()),
        AmplitudeConvention::Linear => {
            let (a, b) = (gamma, T::one() - gamma);
            let n = (a * a + b * b).sqrt();
            (a / n, b / n)
        }
    };
    let mut v = CVector::zeros(sys.dim());
    v[0] = nalgebra::Complex::new(a, T::zero());
    v[1] = nalgebra::Complex::new(b, T::zero());
    QuantumState::pure_normalized(v)
}

/// One-parameter family of preparable states.
pub trait StateFamily<T: Real>: Sync {
    fn bounds(&self) -> (T, T);
    fn state(&self, sys: &SpinSystem<T>, parameter: T) -> Result<QuantumState<T>>;
}

/// The two-level Dicke superposition family, parameterized by `γ ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DickeSuperposition {
    pub convention: AmplitudeConvention,
}

impl<T: Real> StateFamily<T> for DickeSuperposition {
    fn bounds(&self) -> (T, T) {
        (T::zero(), T::one())
    }

    fn state(&self, sys: &SpinSystem<T>, gamma: T) -> Result<QuantumState<T>> {
        dicke_superposition_with(sys, gamma, self.convention)
    }
}

/// Squeezing evaluator for one system size. Holds the benchmark family so
/// that repeated evaluations only pay for the witness-dependent work.
#[derive(Debug, Clone)]
pub struct Squeezer<T: Real = f64> {
    family: BenchmarkFamily<T>,
    settings: Settings<T>,
}

struct Numerator<T: Real> {
    variance: T,
    rotation: RotationSpec<T>,
    converged: bool,
}

impl<T: Real> Squeezer<T> {
    pub fn new(sys: SpinSystem<T>, settings: Settings<T>) -> Result<Self> {
        sys.require_witness_size()?;
        settings.validate()?;
        let family = BenchmarkFamily::new(SpinContext::new(sys), settings.benchmark())?;
        Ok(Self { family, settings })
    }

    pub fn context(&self) -> &SpinContext<T> {
        self.family.context()
    }

    pub fn system(&self) -> &SpinSystem<T> {
        &self.context().sys
    }

    pub fn settings(&self) -> &Settings<T> {
        &self.settings
    }

    pub fn family(&self) -> &BenchmarkFamily<T> {
        &self.family
    }

    fn check_state(&self, state: &QuantumState<T>) -> Result<()> {
        if state.dim() != self.context().dim() {
            return Err(Error::DimensionMismatch {
                expected: self.context().dim(),
                found: state.dim(),
            });
        }
        Ok(())
    }

    pub fn calibrate(&self, state: &QuantumState<T>) -> Result<CalibratedState<T>> {
        self.check_state(state)?;
        CalibratedState::new(self.context(), state)
    }

    fn numerator(&self, cal: &CalibratedState<T>, obs: &Observable<T>) -> Result<Numerator<T>> {
        let s = &self.settings;
        let r = min_over_rotations_prepared(self.context(), cal, obs, s.mode, &s.search)?;
        Ok(Numerator {
            variance: r.variance,
            rotation: r.rotation,
            converged: r.converged,
        })
    }

    fn evaluate(&self, cal: &CalibratedState<T>, chi_prime: T, use_case: UseCase) -> Result<SqueezingResult<T>> {
        let n = self.system().n_atoms();
        let params = CubicParams::from_chi_prime(chi_prime, n)?;
        let op = cubic_operator(self.system(), &params)?;
        let obs = Observable::new(&op);
        let num = self.numerator(cal, &obs)?;
        let bench = self.family.min_variance(&op)?;
        let (xi, singular) = ratio(num.variance, bench.min_variance, n);
        Ok(SqueezingResult {
            xi,
            xi_db: db(xi),
            numerator_variance: num.variance,
            denominator_variance: bench.min_variance,
            chi: params.chi(),
            chi_prime,
            n_atoms: n,
            rotation: num.rotation,
            use_case,
            diagnostics: SqueezingDiagnostics {
                singular,
                converged: num.converged && bench.diagnostics.rotation_converged,
                ..Default::default()
            },
            benchmark: bench,
        })
    }

    /// `ξ` at a fixed witness `O_c(χ′)`.
    pub fn xi_specific(&self, state: &QuantumState<T>, chi_prime: T) -> Result<SqueezingResult<T>> {
        let cal = self.calibrate(state)?;
        self.evaluate(&cal, chi_prime, UseCase::Specific)
    }

    /// Specific `ξ` for a list of `χ′` values, sharing one calibration.
    pub fn xi_specific_many(&self, state: &QuantumState<T>, chi_primes: &[T]) -> Result<Vec<SqueezingResult<T>>> {
        let cal = self.calibrate(state)?;
        chi_primes
            .par_iter()
            .map(|&c| self.evaluate(&cal, c, UseCase::Specific))
            .collect()
    }

    /// Specific `ξ` of many states against one witness; the benchmark is
    /// computed once.
    pub fn xi_specific_batch(&self, states: &[QuantumState<T>], chi_prime: T) -> Result<Vec<SqueezingResult<T>>> {
        let n = self.system().n_atoms();
        let params = CubicParams::from_chi_prime(chi_prime, n)?;
        let op = cubic_operator(self.system(), &params)?;
        let obs = Observable::new(&op);
        let bench = self.family.min_variance(&op)?;
        states
            .par_iter()
            .map(|st| {
                let num = self.numerator(&self.calibrate(st)?, &obs)?;
                let (xi, singular) = ratio(num.variance, bench.min_variance, n);
                Ok(SqueezingResult {
                    xi,
                    xi_db: db(xi),
                    numerator_variance: num.variance,
                    denominator_variance: bench.min_variance,
                    chi: params.chi(),
                    chi_prime,
                    n_atoms: n,
                    rotation: num.rotation,
                    use_case: UseCase::Specific,
                    diagnostics: SqueezingDiagnostics {
                        singular,
                        converged: num.converged && bench.diagnostics.rotation_converged,
                        ..Default::default()
                    },
                    benchmark: bench.clone(),
                })
            })
            .collect()
    }

    /// `ξ` minimized over `χ′` on a log grid per sign followed by golden
    /// refinement in `ln |χ′|`. Uses the configured `χ′` range.
    pub fn xi_resource(&self, state: &QuantumState<T>) -> Result<SqueezingResult<T>> {
        let s = &self.settings;
        self.xi_resource_in(state, s.chi_prime_min, s.chi_prime_max)
    }

    pub fn xi_resource_in(&self, state: &QuantumState<T>, lo: T, hi: T) -> Result<SqueezingResult<T>> {
        let s = &self.settings;
        let cal = self.calibrate(state)?;
        let grid = log_grid(lo, hi, s.chi_prime_points)?;
        let positive = self.resource_one_sign(&cal, &grid, T::one())?;
        let negative = if s.both_signs {
            self.resource_one_sign(&cal, &grid, -T::one())?
        } else {
            None
        };
        let (mut best, other) = match (positive, negative) {
            (Some(p), Some(n)) => {
                // exact ties (real states are sign-symmetric) keep positive χ′
                let slack = real::<T>(1e-9) * p.xi.abs();
                if n.xi < p.xi - slack {
                    let o = p.xi;
                    (n, Some(o))
                } else {
                    let o = n.xi;
                    (p, Some(o))
                }
            }
            (Some(p), None) => (p, None),
            (None, Some(n)) => (n, None),
            (None, None) => {
                return Err(Error::Numerical(
                    "benchmark is singular over the whole chi' range".into(),
                ))
            }
        };
        best.use_case = UseCase::Resource;
        best.diagnostics.opposite_sign_xi = other;
        Ok(best)
    }

    fn resource_one_sign(
        &self,
        cal: &CalibratedState<T>,
        grid: &[T],
        sign: T,
    ) -> Result<Option<SqueezingResult<T>>> {
        let rows = grid
            .par_iter()
            .map(|&c| self.evaluate(cal, sign * c, UseCase::Resource))
            .collect::<Result<Vec<_>>>()?;
        let xis: Vec<T> = rows.iter().map(|r| r.xi).collect();
        let Some(i) = argmin(&xis) else {
            return Ok(None);
        };
        let mut best = rows[i].clone();
        let mut converged = rows.iter().all(|r| r.diagnostics.converged);
        if grid.len() > 1 {
            let lo = grid[i.saturating_sub(1)].ln();
            let hi = grid[(i + 1).min(grid.len() - 1)].ln();
            let tol = self.settings.chi_prime_rel_tol;
            let g = golden_section(
                |lc| {
                    self.evaluate(cal, sign * lc.exp(), UseCase::Resource)
                        .map(|r| r.xi)
                        .unwrap_or(T::max_value().unwrap())
                },
                lo,
                hi,
                tol,
            );
            if g.value < best.xi {
                let r = self.evaluate(cal, sign * g.x.exp(), UseCase::Resource)?;
                if r.xi < best.xi {
                    converged &= r.diagnostics.converged;
                    best = r;
                }
            }
        }
        best.diagnostics.converged = converged;
        best.diagnostics.scan = grid.iter().zip(&rows).map(|(c, r)| (sign * *c, r.xi)).collect();
        Ok(Some(best))
    }

    /// `ξ` at fixed `χ′` minimized over a state family: grid over the
    /// family parameter, then golden refinement around the best point.
    pub fn xi_prepare<F: StateFamily<T>>(&self, family: &F, chi_prime: T) -> Result<SqueezingResult<T>> {
        let s = &self.settings;
        let (lo, hi) = family.bounds();
        let grid = linear_grid(lo, hi, s.family_points)?;
        let n = self.system().n_atoms();
        let params = CubicParams::from_chi_prime(chi_prime, n)?;
        let op = cubic_operator(self.system(), &params)?;
        let obs = Observable::new(&op);
        let bench = self.family.min_variance(&op)?;

        let at = |p: T| -> Result<Numerator<T>> {
            let st = family.state(self.system(), p)?;
            self.numerator(&self.calibrate(&st)?, &obs)
        };
        let nums = grid.par_iter().map(|&p| at(p)).collect::<Result<Vec<_>>>()?;
        let values: Vec<T> = nums.iter().map(|r| r.variance).collect();
        let i = argmin(&values).ok_or_else(|| Error::Numerical("no finite family value".into()))?;
        let mut best_p = grid[i];
        let mut best = nums.into_iter().nth(i).unwrap();
        if grid.len() > 1 {
            let a = grid[i.saturating_sub(1)];
            let b = grid[(i + 1).min(grid.len() - 1)];
            let g = golden_section(
                |p| at(p).map(|r| r.variance).unwrap_or(T::max_value().unwrap()),
                a,
                b,
                s.family_tol,
            );
            if g.value < best.variance {
                best = at(g.x)?;
                best_p = g.x;
            }
        }
        let (xi, singular) = ratio(best.variance, bench.min_variance, n);
        let scan = grid
            .iter()
            .zip(&values)
            .map(|(p, v)| (*p, ratio(*v, bench.min_variance, n).0))
            .collect();
        Ok(SqueezingResult {
            xi,
            xi_db: db(xi),
            numerator_variance: best.variance,
            denominator_variance: bench.min_variance,
            chi: params.chi(),
            chi_prime,
            n_atoms: n,
            rotation: best.rotation,
            use_case: UseCase::Prepare,
            diagnostics: SqueezingDiagnostics {
                singular,
                converged: best.converged && bench.diagnostics.rotation_converged,
                parameter: Some(best_p),
                scan,
                opposite_sign_xi: None,
            },
            benchmark: bench,
        })
    }

    /// Specific `ξ` for each family parameter in `parameters` at fixed `χ′`.
    pub fn xi_family_scan<F: StateFamily<T>>(
        &self,
        family: &F,
        parameters: &[T],
        chi_prime: T,
    ) -> Result<Vec<SqueezingResult<T>>> {
        let n = self.system().n_atoms();
        let params = CubicParams::from_chi_prime(chi_prime, n)?;
        let op = cubic_operator(self.system(), &params)?;
        let obs = Observable::new(&op);
        let bench = self.family.min_variance(&op)?;
        parameters
            .par_iter()
            .map(|&p| {
                let st = family.state(self.system(), p)?;
                let num = self.numerator(&self.calibrate(&st)?, &obs)?;
                let (xi, singular) = ratio(num.variance, bench.min_variance, n);
                Ok(SqueezingResult {
                    xi,
                    xi_db: db(xi),
                    numerator_variance: num.variance,
                    denominator_variance: bench.min_variance,
                    chi: params.chi(),
                    chi_prime,
                    n_atoms: n,
                    rotation: num.rotation,
                    use_case: UseCase::Specific,
                    diagnostics: SqueezingDiagnostics {
                        singular,
                        converged: num.converged && bench.diagnostics.rotation_converged,
                        parameter: Some(p),
                        ..Default::default()
                    },
                    benchmark: bench.clone(),
                })
            })
            .collect()
    }
}

/// One-shot specific squeezing.
pub fn xi_specific<T: Real>(
    state: &QuantumState<T>,
    chi_prime: T,
    sys: &SpinSystem<T>,
    settings: &Settings<T>,
) -> Result<SqueezingResult<T>> {
    Squeezer::new(*sys, *settings)?.xi_specific(state, chi_prime)
}

/// One-shot resource squeezing over `[lo, hi]` in `|χ′|`.
pub fn xi_resource<T: Real>(
    state: &QuantumState<T>,
    sys: &SpinSystem<T>,
    chi_prime_range: (T, T),
    settings: &Settings<T>,
) -> Result<SqueezingResult<T>> {
    let s = Settings {
        chi_prime_min: chi_prime_range.0,
        chi_prime_max: chi_prime_range.1,
        ..*settings
    };
    Squeezer::new(*sys, s)?.xi_resource(state)
}

/// One-shot preparation squeezing.
pub fn xi_prepare<T: Real, F: StateFamily<T>>(
    family: &F,
    chi_prime: T,
    sys: &SpinSystem<T>,
    settings: &Settings<T>,
) -> Result<SqueezingResult<T>> {
    Squeezer::new(*sys, *settings)?.xi_prepare(family, chi_prime)
}

/// `χ′` interval corresponding to a fixed `χ` interval at size `N`.
pub fn chi_prime_range_for_chi<T: Real>(chi_lo: T, chi_hi: T, n_atoms: usize) -> (T, T) {
    let one = chi_from_chi_prime(T::one(), n_atoms);
    (chi_lo / one, chi_hi / one)
}
