//! Rotation calibration and minimization of an observable's variance over
//! the free rotations.
//!
//! Calibration centres a state on the `-x` axis: the mean spin vector is
//! rotated onto `-x`, then a rotation about `x` diagonalizes the transverse
//! `(Jy, Jz)` covariance block. The `-x` pole is where the twist-and-turn
//! ground states live and where `Jz`, `Jy` act as the two quadratures seen by
//! the cubic witness. States with vanishing mean spin are instead aligned by
//! the eigenvectors of their full covariance matrix.

use nalgebra::{Complex, Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::minimize::{argmin, golden_section, nelder_mead, SimplexOptions};
use crate::rotation::{align, axis_angle, rot_x, RotationSpec, Rotator};
use crate::spin::{clamp_variance, spin_moments, QuantumState, SpinOperator, SpinOperators, SpinSystem};
use crate::{real, tol, Real};

/// Per-system cache of spin operators and rotation spectra. Immutable and
/// shareable between threads.
#[derive(Debug, Clone)]
pub struct SpinContext<T: Real = f64> {
    pub sys: SpinSystem<T>,
    pub ops: SpinOperators<T>,
    pub rotator: Rotator<T>,
}

impl<T: Real> SpinContext<T> {
    pub fn new(sys: SpinSystem<T>) -> Self {
        Self {
            ops: SpinOperators::new(&sys),
            rotator: Rotator::new(&sys),
            sys,
        }
    }

    pub fn dim(&self) -> usize {
        self.sys.dim()
    }
}

/// Hermitian observable with its bandwidth, so that banded operators such as
/// the cubic witness are applied in `O(dim · band)`.
#[derive(Debug, Clone)]
pub struct Observable<T: Real = f64> {
    matrix: CMatrix<T>,
    band: usize,
    scale: T,
}

impl<T: Real> Observable<T> {
    pub fn new(op: &SpinOperator<T>) -> Self {
        let m = op.matrix().clone();
        let d = m.nrows();
        let zero = Complex::new(T::zero(), T::zero());
        let mut band = 0;
        for r in 0..d {
            for c in 0..d {
                if m[(r, c)] != zero {
                    band = band.max(r.abs_diff(c));
                }
            }
        }
        let scale = linalg::max_abs(&m);
        Self { matrix: m, band, scale }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn bandwidth(&self) -> usize {
        self.band
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    fn apply(&self, v: &CVector<T>) -> CVector<T> {
        let d = self.dim();
        if self.band + 1 >= d {
            return &self.matrix * v;
        }
        let mut out = CVector::zeros(d);
        for r in 0..d {
            let lo = r.saturating_sub(self.band);
            let hi = (r + self.band).min(d - 1);
            let mut acc = Complex::new(T::zero(), T::zero());
            for c in lo..=hi {
                acc += self.matrix[(r, c)] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// Variance on a pure state (clamped at zero within round-off).
    pub fn variance_pure(&self, psi: &CVector<T>) -> T {
        let o = self.apply(psi);
        let mean = psi.dotc(&o).re;
        let v = linalg::norm_sqr(&o) - mean * mean;
        clamp_variance(v, self.scale).unwrap_or(v.max(T::zero()))
    }

    pub fn variance(&self, state: &QuantumState<T>) -> T {
        match state {
            QuantumState::Pure(psi) => self.variance_pure(psi),
            QuantumState::Mixed(rho) => {
                let ro = rho * &self.matrix;
                let mean = ro.trace().re;
                let second = (ro * &self.matrix).trace().re;
                let v = second - mean * mean;
                clamp_variance(v, self.scale).unwrap_or(v.max(T::zero()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport<T: Real = f64> {
    pub rotation: RotationSpec<T>,
    pub mean_spin_before: [T; 3],
    pub mean_spin_after: [T; 3],
    pub covariance_after: [[T; 3]; 3],
    /// Largest off-diagonal covariance entry remaining in the diagonalized
    /// block.
    pub off_diagonal_residual: T,
    /// `false` when the mean spin vanished and only covariance alignment
    /// was applied.
    pub mean_aligned: bool,
}

fn arr3<T: Real>(v: &Vector3<T>) -> [T; 3] {
    [v[0], v[1], v[2]]
}

fn arr33<T: Real>(m: &Matrix3<T>) -> [[T; 3]; 3] {
    [
        [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
        [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
        [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
    ]
}

/// Calibration frame of a state.
pub fn calibration_matrix<T: Real>(
    mean: &Vector3<T>,
    cov: &Matrix3<T>,
    n_atoms: usize,
) -> (Matrix3<T>, bool) {
    let n = real::<T>(n_atoms as f64);
    if mean.norm() >= tol::<T>(1e-8) * n {
        let to = Vector3::new(-T::one(), T::zero(), T::zero());
        let r1 = align(mean, &to);
        let c1 = r1 * cov * r1.transpose();
        let (cyy, czz, cyz) = (c1[(1, 1)], c1[(2, 2)], c1[(1, 2)]);
        let eps = tol::<T>(1e-12) * (cyy.abs() + czz.abs()).max(T::one());
        let phi = if cyz.abs() <= eps && (cyy - czz).abs() <= eps {
            T::zero()
        } else {
            -(real::<T>(2.0) * cyz).atan2(cyy - czz) * real::<T>(0.5)
        };
        (rot_x(phi) * r1, true)
    } else {
        let eig = SymmetricEigen::new(*cov);
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let (lo, mid, hi) = (idx[0], idx[1], idx[2]);
        let ex = eig.eigenvectors.column(hi).into_owned();
        let ey = eig.eigenvectors.column(lo).into_owned();
        let mut ez = eig.eigenvectors.column(mid).into_owned();
        if ex.cross(&ey).dot(&ez) < T::zero() {
            ez = -ez;
        }
        // rows map the covariance eigenvectors onto x, y, z
        let r = Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ez.transpose()]);
        (r, false)
    }
}

/// A state moved into its calibration frame, with the data needed to scan
/// rotations about the `x` axis cheaply.
#[derive(Debug, Clone)]
pub struct CalibratedState<T: Real = f64> {
    pub report: CalibrationReport<T>,
    /// The original state.
    pub original: QuantumState<T>,
    /// The state in the calibration frame.
    pub state: QuantumState<T>,
    frame: Matrix3<T>,
    jx_coeffs: Option<CVector<T>>,
}

pub fn calibrate_rotation<T: Real>(ctx: &SpinContext<T>, state: &QuantumState<T>) -> Result<CalibrationReport<T>> {
    Ok(CalibratedState::new(ctx, state)?.report)
}

impl<T: Real> CalibratedState<T> {
    pub fn new(ctx: &SpinContext<T>, state: &QuantumState<T>) -> Result<Self> {
        let (mean, cov) = spin_moments(state, &ctx.ops)?;
        let (frame, mean_aligned) = calibration_matrix(&mean, &cov, ctx.sys.n_atoms());
        let rotation = RotationSpec::from_matrix(&frame);
        let moved = ctx.rotator.apply(&rotation, state)?;
        let (mean_after, cov_after) = spin_moments(&moved, &ctx.ops)?;
        let off_diagonal_residual = if mean_aligned {
            cov_after[(1, 2)].abs()
        } else {
            cov_after[(0, 1)]
                .abs()
                .max(cov_after[(0, 2)].abs())
                .max(cov_after[(1, 2)].abs())
        };
        let jx_coeffs = moved.amplitudes().map(|v| ctx.rotator.jx_eigen().project(v));
        Ok(Self {
            report: CalibrationReport {
                rotation,
                mean_spin_before: arr3(&mean),
                mean_spin_after: arr3(&mean_after),
                covariance_after: arr33(&cov_after),
                off_diagonal_residual,
                mean_aligned,
            },
            original: state.clone(),
            state: moved,
            frame,
            jx_coeffs,
        })
    }

    /// The calibrated state rotated by `theta` about `x`.
    pub fn rotated_about_x(&self, ctx: &SpinContext<T>, theta: T) -> QuantumState<T> {
        let eig = ctx.rotator.jx_eigen();
        match &self.jx_coeffs {
            Some(coeffs) => {
                let mut c = coeffs.clone();
                for (k, z) in c.iter_mut().enumerate() {
                    *z *= linalg::polar(T::one(), -(theta * eig.values[k]));
                }
                QuantumState::Pure(&eig.vectors * c)
            }
            None => {
                let u = eig.exp_i(theta);
                match &self.state {
                    QuantumState::Mixed(rho) => QuantumState::Mixed(&u * rho * u.adjoint()),
                    QuantumState::Pure(v) => QuantumState::Pure(&u * v),
                }
            }
        }
    }

    pub fn variance_about_x(&self, ctx: &SpinContext<T>, obs: &Observable<T>, theta: T) -> T {
        obs.variance(&self.rotated_about_x(ctx, theta))
    }

    /// SO(3) matrix of the total rotation "calibrate, then turn by `theta`
    /// about x".
    pub fn total_matrix(&self, theta: T) -> Matrix3<T> {
        rot_x(theta) * self.frame
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RotationMode {
    /// Variance in the calibration frame, minimized over its residual
    /// symmetry: quarter turns about the calibration axis, which keep the
    /// covariance diagonal.
    #[default]
    Calibrated,
    /// Fine scan about the calibration axis with golden refinement.
    Scanned,
    /// The scan followed by simplex searches over all three Euler angles.
    Refined,
}

impl std::str::FromStr for RotationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "calibrated" => Ok(Self::Calibrated),
            "scanned" => Ok(Self::Scanned),
            "refined" => Ok(Self::Refined),
            other => Err(Error::Config(format!("unknown rotation mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for RotationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Calibrated => "calibrated",
            Self::Scanned => "scanned",
            Self::Refined => "refined",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RotationSearch<T: Real = f64> {
    /// Number of scan angles about the calibration axis (72 = steps of π/36).
    pub scan_steps: usize,
    /// Absolute tolerance (rad) of the golden refinement of the scan.
    pub scan_tol: T,
    pub simplex: SimplexOptions<T>,
    /// Extra simplex starts taken from the best points of a coarse
    /// Euler-angle grid (refined mode).
    pub grid_starts: usize,
}

impl<T: Real> Default for RotationSearch<T> {
    fn default() -> Self {
        Self {
            scan_steps: 72,
            scan_tol: real(1e-7),
            simplex: SimplexOptions::default(),
            grid_starts: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationMin<T: Real = f64> {
    pub variance: T,
    pub rotation: RotationSpec<T>,
    /// Variance in the calibration frame itself.
    pub calibrated_variance: T,
    pub evaluations: usize,
    /// `false` if any simplex restart hit its evaluation budget.
    pub converged: bool,
}

/// Best of the four quarter turns about the calibration axis.
pub fn calibrated_min<T: Real>(ctx: &SpinContext<T>, cal: &CalibratedState<T>, obs: &Observable<T>) -> RotationMin<T> {
    let values: Vec<T> = (0..4)
        .map(|k| cal.variance_about_x(ctx, obs, T::frac_pi_2() * real::<T>(k as f64)))
        .collect();
    let k = argmin(&values).unwrap_or(0);
    let theta = T::frac_pi_2() * real::<T>(k as f64);
    RotationMin {
        variance: values[k],
        rotation: RotationSpec::from_matrix(&cal.total_matrix(theta)),
        calibrated_variance: values[0],
        evaluations: 4,
        converged: true,
    }
}

/// Scan about the calibration axis, then golden-section refinement of the
/// best bracket.
pub fn scanned_min<T: Real>(
    ctx: &SpinContext<T>,
    cal: &CalibratedState<T>,
    obs: &Observable<T>,
    search: &RotationSearch<T>,
) -> RotationMin<T> {
    let base = calibrated_min(ctx, cal, obs);
    let steps = search.scan_steps.max(1);
    let step = T::two_pi() / real::<T>(steps as f64);
    let values: Vec<T> = (0..steps)
        .map(|k| cal.variance_about_x(ctx, obs, step * real::<T>(k as f64)))
        .collect();
    let k = argmin(&values).unwrap_or(0);
    let mut theta = step * real::<T>(k as f64);
    let mut best = values[k];
    let mut evals = base.evaluations + steps;
    if steps > 1 {
        let g = golden_section(
            |t| cal.variance_about_x(ctx, obs, t),
            theta - step,
            theta + step,
            search.scan_tol,
        );
        evals += g.evaluations;
        if g.value < best {
            best = g.value;
            theta = g.x;
        }
    }
    if base.variance <= best {
        return RotationMin { evaluations: evals, ..base };
    }
    RotationMin {
        variance: best,
        rotation: RotationSpec::from_matrix(&cal.total_matrix(theta)),
        calibrated_variance: base.calibrated_variance,
        evaluations: evals,
        converged: true,
    }
}

/// The eight fixed starting frames: the given frame and its images under
/// π turns about x, y, z and 2π/3 turns about four body diagonals.
fn restart_frames<T: Real>(base: &Matrix3<T>) -> Vec<Matrix3<T>> {
    let one = T::one();
    let third = T::two_pi() / real::<T>(3.0);
    let mut frames = vec![*base];
    for axis in [Vector3::x(), Vector3::y(), Vector3::z()] {
        frames.push(axis_angle(&axis, T::pi()) * base);
    }
    for d in [
        Vector3::new(one, one, one),
        Vector3::new(one, -one, -one),
        Vector3::new(-one, one, -one),
        Vector3::new(-one, -one, one),
    ] {
        frames.push(axis_angle(&d, third) * base);
    }
    frames
}

/// Best `count` points of a 12 × 6 × 12 z-y-z grid (β at cell midpoints).
fn coarse_grid_frames<T: Real>(
    ctx: &SpinContext<T>,
    psi: &QuantumState<T>,
    obs: &Observable<T>,
    count: usize,
) -> Result<Vec<Matrix3<T>>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let (na, nb) = (12usize, 6usize);
    let mut scored: Vec<(T, RotationSpec<T>)> = Vec::with_capacity(na * nb * na);
    for a in 0..na {
        for b in 0..nb {
            for c in 0..na {
                let r = RotationSpec::raw(
                    T::two_pi() * real::<T>(a as f64 / na as f64),
                    T::pi() * real::<T>((b as f64 + 0.5) / nb as f64),
                    T::two_pi() * real::<T>(c as f64 / na as f64),
                );
                let v = match psi {
                    QuantumState::Pure(v) => obs.variance_pure(&ctx.rotator.apply_vec(&r, v)),
                    QuantumState::Mixed(_) => obs.variance(&ctx.rotator.apply(&r, psi)?),
                };
                scored.push((v, r));
            }
        }
    }
    // stable sort keeps grid order on ties
    scored.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(scored.into_iter().take(count).map(|(_, r)| r.matrix()).collect())
}

/// Simplex refinement over z-y-z Euler angles, each restart in a chart
/// centred on its starting frame (`Rz(a) Ry(π/2 + b) Rz(c) Ry(-π/2) · start`)
/// so the start is away from gimbal lock.
pub fn refined_min<T: Real>(
    ctx: &SpinContext<T>,
    cal: &CalibratedState<T>,
    obs: &Observable<T>,
    search: &RotationSearch<T>,
) -> Result<RotationMin<T>> {
    let base = scanned_min(ctx, cal, obs, search);
    let half_pi = T::frac_pi_2();
    let chart_out = RotationSpec::raw(T::zero(), -half_pi, T::zero());
    let mut best = base.clone();
    let mut evals = base.evaluations;
    let mut converged = true;
    let mut frames = restart_frames(&base.rotation.matrix());
    frames.extend(coarse_grid_frames(ctx, &cal.original, obs, search.grid_starts)?);
    for frame in frames {
        let start = RotationSpec::from_matrix(&frame);
        let pre = chart_out.after(&start);
        let prepared = ctx.rotator.apply(&pre, &cal.original)?;
        let objective = |p: &[T]| {
            let r = RotationSpec::raw(p[0], half_pi + p[1], p[2]);
            match &prepared {
                QuantumState::Pure(v) => obs.variance_pure(&ctx.rotator.apply_vec(&r, v)),
                QuantumState::Mixed(_) => ctx
                    .rotator
                    .apply(&r, &prepared)
                    .map(|s| obs.variance(&s))
                    .unwrap_or_else(|_| T::max_value().unwrap()),
            }
        };
        let res = nelder_mead(objective, &[T::zero(), T::zero(), T::zero()], &search.simplex)?;
        evals += res.evaluations;
        converged &= res.converged;
        if res.value < best.variance {
            let chart = RotationSpec::raw(res.x[0], half_pi + res.x[1], res.x[2]);
            best.variance = res.value;
            best.rotation = chart.after(&pre);
        }
    }
    best.evaluations = evals;
    best.converged = converged;
    Ok(best)
}

/// Minimum variance of `observable` over rotated copies of `state`.
pub fn min_variance_over_rotations<T: Real>(
    ctx: &SpinContext<T>,
    state: &QuantumState<T>,
    observable: &SpinOperator<T>,
    mode: RotationMode,
    search: &RotationSearch<T>,
) -> Result<RotationMin<T>> {
    if observable.dim() != state.dim() || state.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch {
            expected: ctx.dim(),
            found: if observable.dim() != ctx.dim() { observable.dim() } else { state.dim() },
        });
    }
    let cal = CalibratedState::new(ctx, state)?;
    let obs = Observable::new(observable);
    min_over_rotations_prepared(ctx, &cal, &obs, mode, search)
}

pub fn min_over_rotations_prepared<T: Real>(
    ctx: &SpinContext<T>,
    cal: &CalibratedState<T>,
    obs: &Observable<T>,
    mode: RotationMode,
    search: &RotationSearch<T>,
) -> Result<RotationMin<T>> {
    match mode {
        RotationMode::Calibrated => Ok(calibrated_min(ctx, cal, obs)),
        RotationMode::Scanned => Ok(scanned_min(ctx, cal, obs, search)),
        RotationMode::Refined => refined_min(ctx, cal, obs, search),
    }
}
