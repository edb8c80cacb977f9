//! Gaussian-like benchmark states: ground states of the twist-and-turn
//! family `H(g) = [g² Jz² + Jy² + g Jx] / (1 + g²)`, and the minimum witness
//! variance they can reach under free rotations.
//!
//! `g ∈ [0, ∞]` is parameterized by `t = g / (1 + g) ∈ [0, 1]`; in that
//! coordinate the three coefficients are `t²/n`, `(1-t)²/n` and `t(1-t)/n`
//! with `n = t² + (1-t)²`, which stays finite at `t = 1` (pure `Jz²`).

use nalgebra::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{
    min_over_rotations_prepared, CalibratedState, Observable, RotationMode, RotationSearch, SpinContext,
};
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::minimize::{argmin, golden_section, linear_grid};
use crate::rotation::RotationSpec;
use crate::spin::{QuantumState, SpinOperator};
use crate::{real, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistTurnParams<T: Real = f64> {
    t: T,
}

impl<T: Real> TwistTurnParams<T> {
    /// `g ≥ 0`; `g = +∞` is accepted and maps to `t = 1`.
    pub fn from_g(g: T) -> Result<Self> {
        // also rejects NaN
        if g.partial_cmp(&T::zero()).is_none_or(|o| o.is_lt()) {
            return Err(Error::Domain(format!(
                "twist-and-turn parameter must be nonnegative, got {}",
                crate::to_f64(g)
            )));
        }
        let t = if g.is_finite() { g / (T::one() + g) } else { T::one() };
        Ok(Self { t })
    }

    pub fn from_t(t: T) -> Result<Self> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::Domain(format!(
                "compactified parameter must lie in [0, 1], got {}",
                crate::to_f64(t)
            )));
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// `g = t / (1 - t)`; infinite at `t = 1`.
    pub fn g(&self) -> T {
        if self.t >= T::one() {
            T::max_value().unwrap_or(T::one() / T::default_epsilon())
        } else {
            self.t / (T::one() - self.t)
        }
    }

    pub fn g_is_infinite(&self) -> bool {
        self.t >= T::one()
    }

    /// Coefficients of `(Jz², Jy², Jx)`.
    pub fn coefficients(&self) -> (T, T, T) {
        let t = self.t;
        let s = T::one() - t;
        let n = t * t + s * s;
        (t * t / n, s * s / n, t * s / n)
    }
}

pub fn twist_turn_hamiltonian<T: Real>(ctx: &SpinContext<T>, params: &TwistTurnParams<T>) -> SpinOperator<T> {
    let (cz, cy, cx) = params.coefficients();
    let jz = ctx.ops.jz.matrix();
    let jy = ctx.ops.jy.matrix();
    let jx = ctx.ops.jx.matrix();
    let scale = |m: nalgebra::DMatrix<Complex<T>>, c: T| m.map(|z| z * c);
    let h = scale(jz * jz, cz) + scale(jy * jy, cy) + scale(jx.clone(), cx);
    SpinOperator::from_parts(h, format!("H(t={})", crate::to_f64(params.t)))
}

#[derive(Debug, Clone)]
pub struct GroundState<T: Real = f64> {
    pub energy: T,
    pub state: QuantumState<T>,
    /// Gap between the two lowest eigenvalues.
    pub gap: T,
    /// Lowest two eigenvalues closer than `1e-9 ·` spectral range.
    pub degenerate: bool,
    /// Orthonormal basis of the (near-)degenerate lowest eigenspace.
    pub subspace: Vec<CVector<T>>,
}

pub fn ground_state<T: Real>(op: &SpinOperator<T>) -> GroundState<T> {
    let eig = op.eigen();
    let d = eig.dim();
    let lowest = eig.values[0];
    let range = eig.values[d - 1] - lowest;
    let thresh = real::<T>(1e-9) * range.max(T::default_epsilon());
    let gap = if d > 1 { eig.values[1] - lowest } else { T::max_value().unwrap() };
    let subspace: Vec<CVector<T>> = (0..d)
        .take_while(|&k| eig.values[k] - lowest < thresh)
        .map(|k| eig.vectors.column(k).into_owned())
        .collect();
    GroundState {
        energy: lowest,
        state: QuantumState::Pure(eig.vectors.column(0).into_owned()),
        gap,
        degenerate: subspace.len() > 1,
        subspace,
    }
}

/// Candidate free states at one family member: the ground state, or for a
/// degenerate lowest level every basis vector of that eigenspace and, when
/// it is two-dimensional, a coarse grid of normalized superpositions.
fn candidates<T: Real>(gs: &GroundState<T>) -> Vec<QuantumState<T>> {
    if !gs.degenerate {
        return vec![gs.state.clone()];
    }
    let mut out: Vec<QuantumState<T>> = gs.subspace.iter().cloned().map(QuantumState::Pure).collect();
    if gs.subspace.len() == 2 {
        let (e1, e2) = (&gs.subspace[0], &gs.subspace[1]);
        for ia in 1..8 {
            let a = T::frac_pi_2() * real::<T>(ia as f64 / 8.0);
            for ib in 0..8 {
                let b = T::two_pi() * real::<T>(ib as f64 / 8.0);
                let w = e1.map(|z| z * a.cos()) + e2.map(|z| z * crate::linalg::polar(a.sin(), b));
                out.push(QuantumState::Pure(w));
            }
        }
    }
    out
}

/// One family member, calibrated once and reused for every observable.
#[derive(Debug, Clone)]
pub struct FamilyMember<T: Real = f64> {
    pub params: TwistTurnParams<T>,
    pub ground: GroundState<T>,
    states: Vec<CalibratedState<T>>,
}

impl<T: Real> FamilyMember<T> {
    pub fn new(ctx: &SpinContext<T>, params: TwistTurnParams<T>) -> Result<Self> {
        let ground = ground_state(&twist_turn_hamiltonian(ctx, &params));
        let states = candidates(&ground)
            .iter()
            .map(|s| CalibratedState::new(ctx, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { params, ground, states })
    }

    /// Best `(variance, rotation, state)` over the candidates, including
    /// the unrotated ground state itself.
    fn min_variance(
        &self,
        ctx: &SpinContext<T>,
        obs: &Observable<T>,
        mode: RotationMode,
        search: &RotationSearch<T>,
    ) -> Result<(T, RotationSpec<T>, QuantumState<T>, bool)> {
        let mut best: Option<(T, RotationSpec<T>, QuantumState<T>, bool)> = None;
        for cal in &self.states {
            let raw = obs.variance(&cal.original);
            if best.as_ref().is_none_or(|b| raw < b.0) {
                best = Some((raw, RotationSpec::identity(), cal.original.clone(), true));
            }
            let r = min_over_rotations_prepared(ctx, cal, obs, mode, search)?;
            if r.variance < best.as_ref().map(|b| b.0).unwrap() {
                let st = ctx.rotator.apply(&r.rotation, &cal.original)?;
                best = Some((r.variance, r.rotation, st, r.converged));
            }
        }
        best.ok_or_else(|| Error::Numerical("no benchmark candidates".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSettings<T: Real = f64> {
    /// Grid points in `t ∈ [0, 1]`.
    pub t_points: usize,
    /// Relative tolerance of the golden refinement in `t`.
    pub t_rel_tol: T,
    pub mode: RotationMode,
    pub search: RotationSearch<T>,
}

impl<T: Real> Default for BenchmarkSettings<T> {
    fn default() -> Self {
        Self {
            t_points: 41,
            t_rel_tol: real(1e-4),
            mode: RotationMode::Calibrated,
            search: RotationSearch::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkResult<T: Real = f64> {
    pub min_variance: T,
    pub optimal_t: T,
    pub optimal_g: T,
    pub optimal_rotation: RotationSpec<T>,
    /// The rotated optimal free state.
    pub optimal_state: QuantumState<T>,
    pub diagnostics: BenchmarkDiagnostics<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkDiagnostics<T: Real = f64> {
    pub grid_t: Vec<T>,
    pub grid_variance: Vec<T>,
    pub refined: bool,
    pub rotation_converged: bool,
    pub degenerate_points: usize,
}

/// Ground states on a `t` grid, computed once per system and shared by all
/// observables.
#[derive(Debug, Clone)]
pub struct BenchmarkFamily<T: Real = f64> {
    ctx: SpinContext<T>,
    members: Vec<FamilyMember<T>>,
    settings: BenchmarkSettings<T>,
}

impl<T: Real> BenchmarkFamily<T> {
    pub fn new(ctx: SpinContext<T>, settings: BenchmarkSettings<T>) -> Result<Self> {
        ctx.sys.require_witness_size()?;
        if settings.t_points == 0 {
            return Err(Error::Config("benchmark grid must contain at least one t value".into()));
        }
        let grid = linear_grid(T::zero(), T::one(), settings.t_points)?;
        let members = grid
            .par_iter()
            .map(|&t| FamilyMember::new(&ctx, TwistTurnParams::from_t(t)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ctx, members, settings })
    }

    pub fn context(&self) -> &SpinContext<T> {
        &self.ctx
    }

    pub fn settings(&self) -> &BenchmarkSettings<T> {
        &self.settings
    }

    pub fn members(&self) -> &[FamilyMember<T>] {
        &self.members
    }

    /// Minimum of the observable's variance over the family and rotations:
    /// grid scan in `t`, then golden refinement around the best grid point.
    pub fn min_variance(&self, observable: &SpinOperator<T>) -> Result<BenchmarkResult<T>> {
        if observable.dim() != self.ctx.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ctx.dim(),
                found: observable.dim(),
            });
        }
        let obs = Observable::new(observable);
        let ctx = &self.ctx;
        let s = &self.settings;
        let per_point = self
            .members
            .par_iter()
            .map(|m| m.min_variance(ctx, &obs, s.mode, &s.search))
            .collect::<Result<Vec<_>>>()?;
        let grid_t: Vec<T> = self.members.iter().map(|m| m.params.t()).collect();
        let grid_variance: Vec<T> = per_point.iter().map(|p| p.0).collect();
        let i = argmin(&grid_variance).ok_or_else(|| Error::Numerical("benchmark grid has no finite value".into()))?;
        let (mut best_v, mut best_rot, mut best_state, mut conv) = per_point[i].clone();
        let mut best_t = grid_t[i];
        let mut refined = false;

        if grid_t.len() > 1 {
            let lo = grid_t[i.saturating_sub(1)];
            let hi = grid_t[(i + 1).min(grid_t.len() - 1)];
            let abs_tol = s.t_rel_tol * best_t.max(real(1e-3));
            let eval = |t: T| -> Option<(T, RotationSpec<T>, QuantumState<T>, bool)> {
                let p = TwistTurnParams::from_t(t).ok()?;
                FamilyMember::new(ctx, p).ok()?.min_variance(ctx, &obs, s.mode, &s.search).ok()
            };
            let g = golden_section(
                |t| eval(t).map(|r| r.0).unwrap_or(T::max_value().unwrap()),
                lo,
                hi,
                abs_tol,
            );
            if g.value < best_v {
                if let Some(r) = eval(g.x) {
                    if r.0 < best_v {
                        (best_v, best_rot, best_state, conv) = r;
                        best_t = g.x;
                        refined = true;
                    }
                }
            }
        }

        let params = TwistTurnParams::from_t(best_t)?;
        Ok(BenchmarkResult {
            min_variance: best_v,
            optimal_t: best_t,
            optimal_g: params.g(),
            optimal_rotation: best_rot,
            optimal_state: best_state,
            diagnostics: BenchmarkDiagnostics {
                grid_t,
                grid_variance,
                refined,
                rotation_converged: conv,
                degenerate_points: self.members.iter().filter(|m| m.ground.degenerate).count(),
            },
        })
    }
}

/// One-shot benchmark minimum for a single observable.
pub fn benchmark_min_variance<T: Real>(
    ctx: &SpinContext<T>,
    observable: &SpinOperator<T>,
    settings: &BenchmarkSettings<T>,
) -> Result<BenchmarkResult<T>> {
    BenchmarkFamily::new(ctx.clone(), *settings)?.min_variance(observable)
}
